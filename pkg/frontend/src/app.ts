import { ApiClient } from "./api.js";
import { debounce, type Debounced } from "./debounce.js";
import { LatestWins } from "./latest.js";
import {
  DEFAULT_BOX,
  prototypePanel,
  tradeoffChart,
  type Box,
} from "./charts.js";
import type {
  Curve,
  DatasetEntry,
  PrototypeResponse,
  ResolveResult,
} from "./types.js";

export interface ExplorerOptions {
  debounceMs?: number;
  k?: number;
  metric?: string;
  seed?: number;
  sampleSize?: number;
  algorithm?: string;
  classifier?: string;
  box?: Box;
}

interface AppState {
  datasets: DatasetEntry[];
  dataset: string | null;
  algorithm: string;
  classifier: string;
  loyaltyPct: number;
  showOriginal: boolean;
  resolved: ResolveResult | null;
  prototypes: PrototypeResponse | null;
  curve: Curve | null;
  error: string | null;
}

const ALGORITHMS = ["rdp", "vw", "bu", "os"];
const CLASSIFIERS = ["knn", "logreg"];
const SVG_NS = "http://www.w3.org/2000/svg";

const SHELL = `
  <div class="controls">
    <label>dataset <select id="dataset"></select></label>
    <label>algorithm <select id="algorithm"></select></label>
    <label>classifier <select id="classifier"></select></label>
    <label>loyalty
      <input id="loyalty" type="range" min="50" max="100" step="1" value="90">
      <span id="loyalty-value">90%</span>
    </label>
    <label><input id="show-original" type="checkbox" checked> show original</label>
  </div>
  <div id="banner" hidden></div>
  <div class="stats">
    <span>alpha_c <b id="stat-alpha">-</b></span>
    <span>loyalty <b id="stat-loyalty">-</b></span>
    <span>kappa <b id="stat-kappa">-</b></span>
    <span>segments <b id="stat-segments">-</b></span>
  </div>
  <div id="curve-panel" hidden></div>
  <div id="prototypes"></div>
`;

export class Explorer {
  readonly root: HTMLElement;
  readonly ready: Promise<void>;

  private api: ApiClient;
  private box: Box;
  private k: number;
  private metric: string;
  private seed: number;
  private sampleSize: number;
  private latest = new LatestWins();
  private debouncedApply: Debounced<[number]>;
  private st: AppState;

  private slider!: HTMLInputElement;
  private loyaltyLabel!: HTMLElement;
  private banner!: HTMLElement;

  constructor(root: HTMLElement, api: ApiClient, opts: ExplorerOptions = {}) {
    this.root = root;
    this.api = api;
    this.box = opts.box ?? DEFAULT_BOX;
    this.k = opts.k ?? 4;
    this.metric = opts.metric ?? "dtw";
    this.seed = opts.seed ?? 42;
    this.sampleSize = opts.sampleSize ?? 100;
    this.st = {
      datasets: [],
      dataset: null,
      algorithm: opts.algorithm ?? "rdp",
      classifier: opts.classifier ?? "knn",
      loyaltyPct: 90,
      showOriginal: true,
      resolved: null,
      prototypes: null,
      curve: null,
      error: null,
    };
    this.debouncedApply = debounce((pct: number) => {
      void this.apply(pct);
    }, opts.debounceMs ?? 250);
    this.buildShell();
    this.ready = this.init();
  }

  state(): Readonly<AppState> {
    return this.st;
  }

  dispose(): void {
    this.debouncedApply.cancel();
  }

  private buildShell(): void {
    this.root.innerHTML = SHELL;
    const byId = <T extends HTMLElement>(id: string) =>
      this.root.querySelector<T>(`#${id}`)!;

    const datasetSel = byId<HTMLSelectElement>("dataset");
    datasetSel.addEventListener("change", () => {
      this.st.dataset = datasetSel.value;
      this.st.resolved = null;
      void this.loadDataset();
    });

    const algSel = byId<HTMLSelectElement>("algorithm");
    for (const a of ALGORITHMS) algSel.append(new Option(a, a));
    algSel.value = this.st.algorithm;
    algSel.addEventListener("change", () => {
      this.st.algorithm = algSel.value;
      this.st.resolved = null;
      void this.loadDataset();
    });

    const clfSel = byId<HTMLSelectElement>("classifier");
    for (const c of CLASSIFIERS) clfSel.append(new Option(c, c));
    clfSel.value = this.st.classifier;
    clfSel.addEventListener("change", () => {
      this.st.classifier = clfSel.value;
      this.st.resolved = null;
      void this.loadDataset();
    });

    this.slider = byId<HTMLInputElement>("loyalty");
    this.loyaltyLabel = byId("loyalty-value");
    this.slider.addEventListener("input", () => {
      this.st.loyaltyPct = Number(this.slider.value);
      this.loyaltyLabel.textContent = `${this.st.loyaltyPct}%`;
      this.debouncedApply(this.st.loyaltyPct);
    });

    const toggle = byId<HTMLInputElement>("show-original");
    toggle.addEventListener("change", () => {
      this.st.showOriginal = toggle.checked;
      this.render();
    });

    this.banner = byId("banner");
  }

  private async init(): Promise<void> {
    try {
      this.st.datasets = await this.api.datasets();
    } catch (err) {
      this.fail(err);
      return;
    }
    const sel = this.root.querySelector<HTMLSelectElement>("#dataset")!;
    for (const d of this.st.datasets) {
      const opt = document.createElement("option");
      opt.value = d.name;
      opt.textContent = d.error ? `${d.name} (unavailable)` : d.name;
      sel.append(opt);
    }
    const first = this.st.datasets.find((d) => !d.error);
    if (!first) {
      this.st.error = "no usable datasets";
      this.render();
      return;
    }
    this.st.dataset = first.name;
    sel.value = first.name;
    await this.loadDataset();
  }

  /**
   * Fetch the dataset's identity-threshold prototypes and its trade-off
   * curve. The two arrive independently; each commit is token-guarded so a
   * dataset/algorithm switch mid-flight discards stale bodies.
   */
  async loadDataset(): Promise<void> {
    const name = this.st.dataset;
    if (!name) return;
    const token = this.latest.begin();
    this.st.error = null;
    this.render();
    const protoBranch = (async () => {
      const protos = await this.api.prototypes({
        dataset: name,
        k: this.k,
        algorithm: this.st.algorithm,
        alpha_c: 1.0,
        metric: this.metric,
        seed: this.seed,
      });
      if (!this.latest.isCurrent(token)) return;
      this.st.prototypes = protos;
      this.render();
    })();
    const curveBranch = (async () => {
      const curve = await this.api.curve({
        dataset: name,
        algorithm: this.st.algorithm,
        classifier: this.st.classifier,
        seed: this.seed,
        sample_size: this.sampleSize,
      });
      if (!this.latest.isCurrent(token)) return;
      this.st.curve = curve;
      this.render();
    })();
    const results = await Promise.allSettled([protoBranch, curveBranch]);
    if (!this.latest.isCurrent(token)) return;
    const bad = results.find((r) => r.status === "rejected");
    if (bad && bad.status === "rejected") this.fail(bad.reason);
  }

  /**
   * Resolve a loyalty percentage to the cheapest alpha_c meeting it, then
   * refetch prototypes at that alpha_c. Stats and prototypes land in one
   * commit, so the displayed alpha_c always matches the displayed panels.
   */
  async apply(pct: number): Promise<void> {
    const name = this.st.dataset;
    if (!name) return;
    const token = this.latest.begin();
    try {
      const resolved = await this.api.resolveLoyalty({
        dataset: name,
        algorithm: this.st.algorithm,
        classifier: this.st.classifier,
        loyalty_target: pct / 100,
        seed: this.seed,
        sample_size: this.sampleSize,
      });
      if (!this.latest.isCurrent(token)) return;
      const protos = await this.api.prototypes({
        dataset: name,
        k: this.k,
        algorithm: this.st.algorithm,
        alpha_c: resolved.alpha_c,
        metric: this.metric,
        seed: this.seed,
      });
      if (!this.latest.isCurrent(token)) return;
      this.st.resolved = resolved;
      this.st.prototypes = protos;
      this.st.error = null;
      this.render();
    } catch (err) {
      if (!this.latest.isCurrent(token)) return;
      this.fail(err);
    }
  }

  private fail(err: unknown): void {
    this.st.error = err instanceof Error ? err.message : String(err);
    this.render();
  }

  /** Repaint everything from current state; no fetches happen here. */
  private render(): void {
    const st = this.st;
    this.banner.hidden = st.error === null;
    this.banner.textContent = st.error ?? "";

    const text = (id: string, value: string) => {
      this.root.querySelector(`#${id}`)!.textContent = value;
    };
    // displayed numbers are the exact API fields, not reformatted copies
    text("stat-alpha", st.resolved ? String(st.resolved.alpha_c) : "-");
    text("stat-loyalty", st.resolved ? String(st.resolved.achieved_loyalty) : "-");
    text("stat-kappa", st.resolved ? String(st.resolved.kappa) : "-");
    text("stat-segments", st.resolved ? String(st.resolved.mean_segments) : "-");

    this.renderCurve();
    this.renderPrototypes();
  }

  private renderCurve(): void {
    const panel = this.root.querySelector<HTMLElement>("#curve-panel")!;
    const vm = tradeoffChart(this.st.curve, this.st.resolved, this.box);
    panel.hidden = vm.hidden;
    panel.textContent = "";
    if (vm.hidden) return;
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${this.box.width} ${this.box.height}`);
    svg.setAttribute("class", "tradeoff");
    const path = document.createElementNS(SVG_NS, "path");
    path.setAttribute("d", vm.path);
    path.setAttribute("class", "curve-line");
    path.setAttribute("fill", "none");
    svg.append(path);
    for (const h of vm.hover) {
      const dot = document.createElementNS(SVG_NS, "circle");
      dot.setAttribute("cx", String(h.x));
      dot.setAttribute("cy", String(h.y));
      dot.setAttribute("r", "3");
      dot.setAttribute("class", "hover-dot");
      const tip = document.createElementNS(SVG_NS, "title");
      tip.textContent =
        `alpha_c ${h.alpha_c}, loyalty ${h.loyalty}, ` +
        `kappa ${h.kappa}, segments ${h.mean_segments}`;
      dot.append(tip);
      svg.append(dot);
    }
    if (vm.marker) {
      const mark = document.createElementNS(SVG_NS, "circle");
      mark.setAttribute("cx", String(vm.marker.x));
      mark.setAttribute("cy", String(vm.marker.y));
      mark.setAttribute("r", "5");
      mark.setAttribute("class", "operating-point");
      svg.append(mark);
    }
    panel.append(svg);
  }

  private renderPrototypes(): void {
    const panel = this.root.querySelector<HTMLElement>("#prototypes")!;
    const vm = prototypePanel(this.st.prototypes, this.st.showOriginal, this.box);
    panel.textContent = "";
    if (vm.empty) {
      const note = document.createElement("p");
      note.className = "placeholder";
      note.textContent = "no prototypes";
      panel.append(note);
      return;
    }
    for (const chart of vm.charts) {
      const fig = document.createElement("figure");
      fig.dataset.key = chart.key;
      const svg = document.createElementNS(SVG_NS, "svg");
      svg.setAttribute("viewBox", `0 0 ${this.box.width} ${this.box.height}`);
      if (chart.dotted !== null) {
        const dotted = document.createElementNS(SVG_NS, "path");
        dotted.setAttribute("d", chart.dotted);
        dotted.setAttribute("class", "dotted");
        dotted.setAttribute("fill", "none");
        svg.append(dotted);
      }
      const solid = document.createElementNS(SVG_NS, "path");
      solid.setAttribute("d", chart.solid);
      solid.setAttribute("class", "solid");
      solid.setAttribute("fill", "none");
      svg.append(solid);
      const cap = document.createElement("figcaption");
      cap.textContent = chart.caption;
      fig.append(svg, cap);
      panel.append(fig);
    }
  }
}

export function createExplorer(
  root: HTMLElement,
  api: ApiClient,
  opts: ExplorerOptions = {},
): Explorer {
  return new Explorer(root, api, opts);
}
