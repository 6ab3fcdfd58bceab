// Polling helper for the async job endpoints.

import type { ApiClient } from "./client.js";
import type { Job } from "./types.js";

export class JobFailedError extends Error {
  readonly job: Job;

  constructor(job: Job) {
    super(job.error ?? `job ${job.id} failed`);
    this.name = "JobFailedError";
    this.job = job;
  }
}

export interface PollOptions {
  /** Milliseconds between polls. */
  intervalMs?: number;
  /** Give up after this many polls. */
  maxPolls?: number;
  /** Called after each poll, e.g. to drive a progress bar. */
  onProgress?: (job: Job) => void;
  /** Injectable for tests; defaults to setTimeout. */
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) =>
  new Promise<void>((resolve) => setTimeout(resolve, ms));

/**
 * Poll a job until it is done, resolving with the finished job.
 * Rejects with JobFailedError if the server reports failure.
 */
export async function pollJob(
  client: ApiClient,
  jobId: string,
  opts: PollOptions = {},
): Promise<Job> {
  const interval = opts.intervalMs ?? 1000;
  const maxPolls = opts.maxPolls ?? 600;
  const sleep = opts.sleep ?? defaultSleep;
  for (let i = 0; i < maxPolls; i++) {
    const job = await client.getJob(jobId);
    opts.onProgress?.(job);
    if (job.status === "done") return job;
    if (job.status === "failed") throw new JobFailedError(job);
    await sleep(interval);
  }
  throw new Error(`job ${jobId} did not finish within ${maxPolls} polls`);
}
