/**
 * Steering controller: one experiment's workflow state and transitions.
 *
 * All state is refreshed from the service on every change and on every poll
 * tick — there are no optimistic updates and no client-side statistics. At
 * most one poll loop runs per controller.
 */
import {
  ApiError,
  Client,
  type ComparisonRow,
  type ExperimentView,
  type FinalReport,
  type JobView,
  type OctantDescriptor,
  type PreviewView,
} from "./api.js";
import { validateScaleExponent } from "./octants.js";

export interface Draft {
  octantIndex: number | null;
  scaleRaw: string;
  scaleExponent: number | null;
  inputMessage: string | null;
}

const emptyDraft = (): Draft => ({
  octantIndex: null,
  scaleRaw: "0",
  scaleExponent: 0,
  inputMessage: null,
});

export class SteeringController {
  view: ExperimentView | null = null;
  octants: OctantDescriptor[] | null = null;
  preview: PreviewView | null = null;
  draft: Draft = emptyDraft();
  job: JobView | null = null;
  report: FinalReport | null = null;
  message: string | null = null;
  private polling = false;

  constructor(
    private client: Client,
    public experimentId: string,
    private onChange: () => void = () => {},
    private pollDelayMs = 250,
    private sleep: (ms: number) => Promise<void> = (ms) =>
      new Promise((resolve) => setTimeout(resolve, ms)),
  ) {}

  private notify(): void {
    this.onChange();
  }

  get globalDone(): boolean {
    return this.view?.phases.some((p) => p.phase === "global") ?? false;
  }

  get jobInFlight(): boolean {
    return (this.view?.active_job ?? null) !== null || this.job?.status === "running";
  }

  get frozen(): boolean {
    return this.view?.status === "satisfied";
  }

  /** The two-column comparison: GA = global phase, two-phase = winning phase.
   * Selection only — all numbers come from service stats fields. */
  get comparison(): ComparisonRow | null {
    const view = this.view;
    if (!view || !view.best || view.phases.length === 0) return null;
    const globalPhase = view.phases[0];
    const winning = view.phases[view.best.phase_index];
    if (!globalPhase || !winning) return null;
    const pick = (s: typeof globalPhase.stats) => ({
      mean: s.mean,
      best: s.best,
      worst: s.worst,
      median: s.median,
      st_dev: s.st_dev,
    });
    return {
      id: view.fid,
      name: view.name,
      HCTPS: pick(winning.stats),
      GA: pick(globalPhase.stats),
      winning_phase_index: view.best.phase_index,
    };
  }

  async refresh(): Promise<void> {
    this.view = await this.client.experiment(this.experimentId);
    if (this.globalDone) {
      this.octants = await this.client.octants(this.experimentId);
    }
    this.notify();
  }

  private async surface<T>(action: () => Promise<T>): Promise<T | null> {
    this.message = null;
    try {
      return await action();
    } catch (err) {
      this.message = err instanceof ApiError ? err.detail : String(err);
      this.notify();
      return null;
    }
  }

  async startGlobal(nRuns: number): Promise<void> {
    const started = await this.surface(() => this.client.startGlobal(this.experimentId, nRuns));
    if (started) await this.watch(started.job_id);
  }

  async selectOctant(index: number): Promise<void> {
    this.draft.octantIndex = index;
    await this.updatePreview();
  }

  async setScaleExponent(raw: string): Promise<void> {
    this.draft.scaleRaw = raw;
    const checked = validateScaleExponent(raw);
    if (!checked.ok) {
      this.draft.scaleExponent = null;
      this.draft.inputMessage = checked.message ?? "invalid";
      this.preview = null;
      this.notify();
      return;
    }
    this.draft.scaleExponent = checked.value!;
    this.draft.inputMessage = null;
    await this.updatePreview();
  }

  private async updatePreview(): Promise<void> {
    const { octantIndex, scaleExponent } = this.draft;
    if (octantIndex === null || scaleExponent === null) {
      this.preview = null;
      this.notify();
      return;
    }
    const preview = await this.surface(() =>
      this.client.localPreview(this.experimentId, octantIndex, scaleExponent),
    );
    this.preview = preview;
    this.notify();
  }

  async launchLocal(nRuns: number): Promise<void> {
    const { octantIndex, scaleExponent } = this.draft;
    if (octantIndex === null || scaleExponent === null) {
      this.message = "pick an octant and a valid scale exponent first";
      this.notify();
      return;
    }
    const started = await this.surface(() =>
      this.client.startLocal(this.experimentId, octantIndex, scaleExponent, nRuns),
    );
    if (started) await this.watch(started.job_id);
  }

  /** Poll a job to completion, then refresh everything from the service. */
  async watch(jobId: string): Promise<void> {
    if (this.polling) return;
    this.polling = true;
    try {
      for (;;) {
        this.job = await this.client.job(jobId);
        this.notify();
        if (this.job.status !== "running") break;
        await this.sleep(this.pollDelayMs);
      }
      if (this.job?.status === "failed") {
        this.message = this.job.error ?? "phase failed";
      }
    } finally {
      this.polling = false;
    }
    await this.refresh();
  }

  async markSatisfied(): Promise<void> {
    const report = await this.surface(() => this.client.markSatisfied(this.experimentId));
    if (report) {
      this.report = report;
      await this.refresh();
    }
  }
}
