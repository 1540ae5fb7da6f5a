// Offline-tolerant submission queue.
//
// Transport failures (fetch rejections) park the submission for replay;
// HTTP errors are final and surfaced to the caller. Submissions within one
// session replay in order.

import { ApiError } from './api.js';

export type SubmitOutcome = 'accepted' | 'rejected' | 'queued';

export interface QueuedSubmission<T> {
  payload: T;
  attempts: number;
}

export class SubmissionQueue<T> {
  pending: QueuedSubmission<T>[] = [];
  lastError: ApiError | null = null;

  constructor(private send: (payload: T) => Promise<unknown>) {}

  async submit(payload: T): Promise<SubmitOutcome> {
    try {
      await this.send(payload);
      return 'accepted';
    } catch (err) {
      if (err instanceof ApiError) {
        this.lastError = err;
        return 'rejected';
      }
      this.pending.push({ payload, attempts: 1 });
      return 'queued';
    }
  }

  /** Replay parked submissions in order; returns how many were accepted. */
  async flush(): Promise<number> {
    const retrying = this.pending;
    this.pending = [];
    let accepted = 0;
    for (const item of retrying) {
      try {
        await this.send(item.payload);
        accepted += 1;
      } catch (err) {
        if (err instanceof ApiError) {
          this.lastError = err; // final: the server saw and refused it
        } else {
          this.pending.push({ payload: item.payload, attempts: item.attempts + 1 });
        }
      }
    }
    return accepted;
  }

  /** Replay whenever connectivity returns. */
  attachOnlineReplay(target: { addEventListener: Window['addEventListener'] }): void {
    target.addEventListener('online', () => {
      void this.flush();
    });
  }
}
