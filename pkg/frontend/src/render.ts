/**
 * Pure HTML renderers. Every number printed here is a service response
 * field passed through a display format; nothing is computed client-side.
 */
import type { ExperimentView, PhaseView, StatsView } from "./api.js";
import { boundsLabel, octantLayers, octantSigns, scaleFactorLabel } from "./octants.js";
import type { SteeringController } from "./state.js";

export function esc(text: unknown): string {
  return String(text)
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function fmt(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 0.001 && magnitude < 1e6) {
    return String(Number(value.toPrecision(6)));
  }
  return value.toExponential(5).toUpperCase().replace("E", "E");
}

function statsCells(stats: StatsView): string {
  return [stats.mean, stats.best, stats.worst, stats.median, stats.st_dev]
    .map((v) => `<td class="num">${fmt(v)}</td>`)
    .join("");
}

function phaseLabel(phase: PhaseView): string {
  if (phase.subcube_spec === null) {
    return phase.phase === "global" ? "global cube" : "custom box";
  }
  const { octant_index, scale_exponent } = phase.subcube_spec;
  return `octant ${octant_index} ${octantSigns(octant_index)}, m=${scale_exponent}`;
}

export function renderHistory(view: ExperimentView): string {
  if (view.phases.length === 0) {
    return `<p class="muted">No phases yet — start with the global search.</p>`;
  }
  const rows = view.phases
    .map((p, i) => {
      const winner = view.best && view.best.phase_index === i ? " class=\"winner\"" : "";
      return (
        `<tr${winner}><td>${i}</td><td>${esc(p.phase)}</td><td>${esc(phaseLabel(p))}</td>` +
        statsCells(p.stats) +
        `<td class="num">${p.stats.n_runs}</td></tr>`
      );
    })
    .join("");
  return `
    <table class="stats">
      <thead><tr><th>#</th><th>Phase</th><th>Region</th>
        <th>Mean</th><th>Best</th><th>Worst</th><th>Median</th><th>St. Dev</th><th>Runs</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>`;
}

export function renderComparison(controller: SteeringController): string {
  const row = controller.comparison;
  if (!row) return "";
  const metric = (label: string, key: keyof typeof row.HCTPS) =>
    `<tr><td>${label}</td><td class="num">${fmt(row.HCTPS[key]!)}</td>` +
    `<td class="num">${fmt(row.GA[key]!)}</td></tr>`;
  return `
    <h3>${esc(row.id)} ${esc(row.name)} — comparison</h3>
    <table class="stats compare">
      <thead><tr><th></th><th>HCTPS-GA (phase ${row.winning_phase_index})</th><th>GA (global)</th></tr></thead>
      <tbody>
        ${metric("Mean", "mean")}
        ${metric("Best", "best")}
        ${metric("Worst", "worst")}
        ${metric("Median", "median")}
        ${metric("St. Dev", "st_dev")}
      </tbody>
    </table>`;
}

function octantCell(controller: SteeringController, octantIndex: number): string {
  const descriptor = controller.octants?.find((o) => o.octant_index === octantIndex);
  if (!descriptor) return "<td></td>";
  const selected = controller.draft.octantIndex === octantIndex ? " selected" : "";
  const runs = descriptor.phases
    .map((p) => `<div class="mini">m=${p.scale_exponent}: best ${fmt(p.stats.best)}</div>`)
    .join("");
  const disabled = controller.jobInFlight || controller.frozen ? " disabled" : "";
  return `
    <td class="octant${selected}">
      <button data-action="pick-octant" data-octant="${octantIndex}"${disabled}>
        ${octantIndex} <span class="signs">${octantSigns(octantIndex)}</span>
      </button>
      ${runs}
    </td>`;
}

export function renderOctantPicker(controller: SteeringController): string {
  if (!controller.octants) return "";
  const layers = octantLayers(controller.octants);
  const grid = (cells: number[][], title: string) => `
    <div class="layer"><h4>${title}</h4>
      <table class="grid">
        ${cells.map((row) => `<tr>${row.map((i) => octantCell(controller, i)).join("")}</tr>`).join("")}
      </table>
    </div>`;
  const lower = grid(
    layers.lower.map((row) => row.map((d) => d.octant_index)),
    "lower layer (z low)",
  );
  const upper = grid(
    layers.upper.map((row) => row.map((d) => d.octant_index)),
    "upper layer (z high)",
  );

  const draft = controller.draft;
  const inputError = draft.inputMessage
    ? `<span class="error">${esc(draft.inputMessage)}</span>`
    : "";
  const factor =
    draft.scaleExponent !== null
      ? `<span class="muted">${esc(scaleFactorLabel(draft.scaleExponent))}</span>`
      : "";
  let previewHtml = "";
  const preview = controller.preview;
  if (preview) {
    const lo = preview.region.lo;
    const hi = preview.region.hi;
    const cells = lo
      .slice(0, 6)
      .map((l, i) => `<code>x${i + 1} ∈ ${esc(boundsLabel(l, hi[i]!))}</code>`)
      .join(" ");
    previewHtml = `
      <div class="preview" data-role="preview">
        <strong>${lo.length}-D bounds preview:</strong> ${cells}
        <span class="muted">… pattern repeats cyclically</span>
      </div>`;
  }
  const disabled = controller.jobInFlight || controller.frozen ? " disabled" : "";
  return `
    <h3>Pick a subcube</h3>
    <div class="layers">${lower}${upper}</div>
    <label>scale exponent m:
      <input data-action="scale-exp" type="text" inputmode="numeric"
             value="${esc(draft.scaleRaw)}"${disabled}> ${factor} ${inputError}
    </label>
    ${previewHtml}
    <button data-action="launch-local"${disabled}>Run local phase</button>`;
}

export function renderProgress(controller: SteeringController): string {
  const job = controller.view?.active_job ?? controller.job;
  if (!job || (controller.job && controller.job.status !== "running" && !controller.view?.active_job)) {
    return "";
  }
  const completed = controller.job?.status === "running" ? controller.job.completed : job.completed;
  const total = controller.job?.status === "running" ? controller.job.total : job.total;
  return `<div class="progress" data-role="progress">run ${completed}/${total}</div>`;
}

export function renderReport(controller: SteeringController): string {
  const report = controller.report;
  if (!report) return "";
  return `
    <div class="modal" data-role="final-report">
      <h3>Final report</h3>
      <p>best value <strong>${fmt(report.best_value)}</strong>
         found in phase ${report.phase_index}</p>
      <p class="muted">record frozen (${esc(report.status)})</p>
    </div>`;
}

export function renderExperiment(controller: SteeringController): string {
  const view = controller.view;
  if (!view) return `<p class="muted">loading…</p>`;
  const message = controller.message
    ? `<div class="error" data-role="message">${esc(controller.message)}</div>`
    : "";
  const busy = controller.jobInFlight || controller.frozen ? " disabled" : "";
  const globalButton = controller.globalDone
    ? ""
    : `<button data-action="start-global"${busy}>Run global phase</button>`;
  const satisfied = view.phases.length
    ? `<button data-action="satisfied"${busy}>Mark satisfied</button>`
    : "";
  return `
    <section>
      <h2>${esc(view.fid)} ${esc(view.name)} — dim ${view.dim}
        <span class="status">${esc(view.status)}</span></h2>
      ${message}
      ${globalButton}
      ${renderProgress(controller)}
      <h3>Sequence history</h3>
      ${renderHistory(view)}
      ${renderComparison(controller)}
      ${controller.globalDone && !controller.frozen ? renderOctantPicker(controller) : ""}
      ${satisfied}
      ${renderReport(controller)}
    </section>`;
}
