/**
 * Bootstrap: experiment chooser plus the steering panel, wired through
 * event delegation onto the renderers.
 */
import { Client, type FunctionRow } from "./api.js";
import { esc, renderExperiment } from "./render.js";
import { SteeringController } from "./state.js";

const SERVICE_URL = (window as { HCTPS_SERVICE_URL?: string }).HCTPS_SERVICE_URL ?? "http://127.0.0.1:8000";

const client = new Client(SERVICE_URL);
const root = document.querySelector("#app") as HTMLElement;
let controller: SteeringController | null = null;
let functions: FunctionRow[] = [];

function renderChooser(): string {
  const options = functions
    .map((f) => `<option value="${esc(f.id)}">${esc(f.id)} — ${esc(f.name)}</option>`)
    .join("");
  return `
    <header>
      <h1>Two-phase search steering</h1>
      <label>function <select data-role="fid">${options}</select></label>
      <label>runs/phase <input data-role="runs" type="number" value="20" min="1" style="width:4em"></label>
      <button data-action="create">New experiment</button>
    </header>
    <div data-role="panel"></div>`;
}

function redraw(): void {
  const panel = root.querySelector("[data-role=panel]");
  if (panel && controller) panel.innerHTML = renderExperiment(controller);
}

function runsPerPhase(): number {
  const input = root.querySelector("[data-role=runs]") as HTMLInputElement | null;
  const n = input ? Number(input.value) : 20;
  return Number.isInteger(n) && n >= 1 ? n : 20;
}

async function createExperiment(): Promise<void> {
  const select = root.querySelector("[data-role=fid]") as HTMLSelectElement;
  const { id } = await client.createExperiment(select.value);
  controller = new SteeringController(client, id, redraw);
  await controller.refresh();
}

root.addEventListener("click", (event) => {
  const target = (event.target as HTMLElement).closest("[data-action]");
  if (!(target instanceof HTMLElement)) return;
  const action = target.dataset.action;
  if (action === "create") void createExperiment();
  if (!controller) return;
  if (action === "start-global") void controller.startGlobal(runsPerPhase());
  if (action === "pick-octant") void controller.selectOctant(Number(target.dataset.octant));
  if (action === "launch-local") void controller.launchLocal(runsPerPhase());
  if (action === "satisfied") void controller.markSatisfied();
});

root.addEventListener("change", (event) => {
  const target = event.target as HTMLElement;
  if (target.matches("[data-action=scale-exp]") && controller) {
    void controller.setScaleExponent((target as HTMLInputElement).value);
  }
});

async function boot(): Promise<void> {
  functions = await client.functions();
  root.innerHTML = renderChooser();
}

void boot();
