/** Chart renderers: uPlot for the HV curve, SVG for the front scatter. */

import uPlot from "uplot";

const SVG_NS = "http://www.w3.org/2000/svg";

/** Non-dominated front scatter; archive points in objective space. */
export function renderFrontScatter(el: HTMLElement, points: number[][]): void {
  el.innerHTML = "";
  const width = el.clientWidth || 420;
  const height = 300;
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "front-scatter");
  if (points.length) {
    const xs = points.map((p) => p[0]);
    const ys = points.map((p) => p[1]);
    const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
    const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
    const pad = 12;
    const sx = (v: number) =>
      pad + ((v - x0) / Math.max(x1 - x0, 1e-12)) * (width - 2 * pad);
    const sy = (v: number) =>
      height - pad - ((v - y0) / Math.max(y1 - y0, 1e-12)) * (height - 2 * pad);
    for (const [fx, fy] of points) {
      const dot = document.createElementNS(SVG_NS, "circle");
      dot.setAttribute("cx", sx(fx).toFixed(1));
      dot.setAttribute("cy", sy(fy).toFixed(1));
      dot.setAttribute("r", "3");
      svg.appendChild(dot);
    }
  }
  el.appendChild(svg);
}

/** Hypervolume vs function evaluations, appended point by point. */
export class HvChart {
  private readonly fes: number[] = [];
  private readonly hvs: number[] = [];
  private plot: uPlot | null = null;

  constructor(private readonly el: HTMLElement) {}

  push(fe: number, hv: number): void {
    const last = this.fes[this.fes.length - 1];
    if (last === fe) return;
    this.fes.push(fe);
    this.hvs.push(hv);
    const data: uPlot.AlignedData = [this.fes, this.hvs];
    if (this.plot === null) {
      this.plot = new uPlot(
        {
          width: this.el.clientWidth || 420,
          height: 220,
          series: [{ label: "FE" }, { label: "HV", stroke: "#1f77b4" }],
          scales: { x: { time: false } },
        },
        data,
        this.el,
      );
    } else {
      this.plot.setData(data);
    }
  }
}

/** Variable relation graph overlay: variables on a circle, rules as chords. */
export function renderVrgOverlay(
  el: HTMLElement,
  edges: Array<{ from: number; to: number; kind: string; rank: number }>,
): void {
  el.innerHTML = "";
  if (!edges.length) return;
  const nodes = [...new Set(edges.flatMap((e) => [e.from, e.to]))].sort((a, b) => a - b);
  const size = 260;
  const r = size / 2 - 24;
  const cx = size / 2;
  const cy = size / 2;
  const pos = new Map(nodes.map((n, k) => {
    const angle = (2 * Math.PI * k) / nodes.length - Math.PI / 2;
    return [n, [cx + r * Math.cos(angle), cy + r * Math.sin(angle)]] as const;
  }));
  const colors: Record<string, string> = {
    power_law: "#4c78a8", equality: "#54a24b",
    inequality_le: "#b5651d", inequality_ge: "#8a4f1d",
  };
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${size} ${size}`);
  svg.setAttribute("class", "vrg-overlay");
  for (const edge of edges) {
    const [x1, y1] = pos.get(edge.from)!;
    const [x2, y2] = pos.get(edge.to)!;
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", x1.toFixed(1));
    line.setAttribute("y1", y1.toFixed(1));
    line.setAttribute("x2", x2.toFixed(1));
    line.setAttribute("y2", y2.toFixed(1));
    line.setAttribute("stroke", colors[edge.kind] ?? "#999");
    line.setAttribute("stroke-width", edge.rank === 1 ? "2.5" : "1");
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `x${edge.from + 1} - x${edge.to + 1} (${edge.kind}, rank ${edge.rank})`;
    line.appendChild(title);
    svg.appendChild(line);
  }
  for (const n of nodes) {
    const [x, y] = pos.get(n)!;
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", x.toFixed(1));
    dot.setAttribute("cy", y.toFixed(1));
    dot.setAttribute("r", "9");
    dot.setAttribute("class", "vrg-node");
    svg.appendChild(dot);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", x.toFixed(1));
    label.setAttribute("y", (y + 3.5).toFixed(1));
    label.setAttribute("text-anchor", "middle");
    label.setAttribute("font-size", "8");
    label.textContent = `x${n + 1}`;
    svg.appendChild(label);
  }
  el.appendChild(svg);
}

/** Ensemble selection probabilities as horizontal stacked strips. */
export function renderEnsembleStrip(
  el: HTMLElement,
  probabilities: Record<string, number[]>,
  labels = ["RA1", "RA2", "RA3", "none"],
): void {
  el.innerHTML = "";
  for (const [family, p] of Object.entries(probabilities)) {
    const row = document.createElement("div");
    row.className = "ensemble-row";
    const name = document.createElement("span");
    name.textContent = family;
    row.appendChild(name);
    const strip = document.createElement("div");
    strip.className = "ensemble-strip";
    p.forEach((value, k) => {
      const seg = document.createElement("div");
      seg.className = `ensemble-seg seg-${k}`;
      seg.style.width = `${(value * 100).toFixed(1)}%`;
      seg.title = `${labels[k] ?? k}: ${(value * 100).toFixed(1)}%`;
      strip.appendChild(seg);
    });
    row.appendChild(strip);
    el.appendChild(row);
  }
}
