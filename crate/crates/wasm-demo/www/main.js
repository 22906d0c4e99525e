// Built with: wasm-pack build --target web --out-dir www/pkg crates/wasm-demo
import init, { covert_curve, schemes, threshold_curve } from "./pkg/covert_watch_demo.js";

const DB_FIELDS = new Set(["p_a", "p_j_max", "sigma2_ab", "sigma2_am", "sigma2_mb", "sigma2_mm"]);
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

const fromDb = (db) => Math.pow(10, db / 10);

function readFields(id, dbFields = new Set()) {
  const out = {};
  for (const input of document.querySelectorAll(`#${id} input`)) {
    const v = Number(input.value);
    out[input.name] = dbFields.has(input.name) ? fromDb(v) : v;
  }
  return out;
}

function params() {
  return { ...readFields("params", DB_FIELDS), sigma2_b: 1, sigma2_m: 1 };
}

function call(fn, request) {
  document.getElementById("error").textContent = "";
  try {
    return JSON.parse(fn(JSON.stringify(request)));
  } catch (e) {
    document.getElementById("error").textContent = String(e.message ?? e);
    return null;
  }
}

// Line plot with optional vertical and horizontal markers.
function plot(canvasId, xs, series, { vlines = [], hlines = [], xlabel = "", ymax } = {}) {
  const c = document.getElementById(canvasId);
  const g = c.getContext("2d");
  const pad = { l: 50, r: 10, t: 10, b: 30 };
  const w = c.width - pad.l - pad.r, h = c.height - pad.t - pad.b;
  const x0 = Math.min(...xs), x1 = Math.max(...xs) || 1;
  const y1 = ymax ?? Math.max(1e-12, ...series.flatMap((s) => s.ys));
  const px = (x) => pad.l + ((x - x0) / (x1 - x0 || 1)) * w;
  const py = (y) => pad.t + h - (y / y1) * h;
  g.clearRect(0, 0, c.width, c.height);
  g.strokeStyle = "#000";
  g.strokeRect(pad.l, pad.t, w, h);
  g.fillStyle = "#000";
  g.fillText(y1.toPrecision(3), 5, pad.t + 10);
  g.fillText("0", 30, pad.t + h);
  g.fillText(x0.toPrecision(3), pad.l, c.height - 8);
  g.fillText(x1.toPrecision(3), pad.l + w - 30, c.height - 8);
  g.fillText(xlabel, pad.l + w / 2, c.height - 8);
  series.forEach((s, i) => {
    g.strokeStyle = COLORS[i % COLORS.length];
    g.beginPath();
    s.ys.forEach((y, k) => (k ? g.lineTo(px(xs[k]), py(y)) : g.moveTo(px(xs[k]), py(y))));
    g.stroke();
    g.fillStyle = g.strokeStyle;
    g.fillText(s.label, pad.l + 8, pad.t + 14 + 14 * i);
  });
  g.setLineDash([4, 4]);
  g.strokeStyle = "#888";
  for (const x of vlines) {
    g.beginPath(); g.moveTo(px(x), pad.t); g.lineTo(px(x), pad.t + h); g.stroke();
  }
  for (const y of hlines) {
    g.beginPath(); g.moveTo(pad.l, py(y)); g.lineTo(pad.l + w, py(y)); g.stroke();
  }
  g.setLineDash([]);
}

function runCovert() {
  const r = call(covert_curve, { params: params(), points: 200 });
  if (!r) return;
  const cap = r.p_j_covert === null ? "unconstrained" : r.p_j_covert.toPrecision(4);
  document.getElementById("covert-info").textContent =
    `P_J^covert = ${cap}, allowed maximum = ${r.p_j_allowed_max.toPrecision(4)}, covert floor 1−δ = ${r.floor}`;
  plot("covert-plot", r.p_j, [{ label: "ξ̄*", ys: r.xi_bar }], {
    vlines: [r.p_j_allowed_max], hlines: [r.floor], xlabel: "P_J (linear)", ymax: 1,
  });
}

function runSchemes() {
  const r = call(schemes, { params: params(), points: 200 });
  if (!r) return;
  document.getElementById("schemes-info").textContent =
    `passive ${r.passive.toFixed(4)}, constant covert ${r.constant_covert.toFixed(4)}, ` +
    `optimal ${r.optimal.toFixed(4)} at P_J* = ${r.p_j_star.toPrecision(4)} (${r.regime})`;
  plot("schemes-plot", r.p_j, [{ label: "E[X]", ys: r.e_x }], {
    vlines: [r.p_j_star], xlabel: "P_J (linear, up to the covert budget)",
  });
}

function runThreshold() {
  const r = call(threshold_curve, { inputs: readFields("detector"), points: 300 });
  if (!r) return;
  document.getElementById("threshold-info").textContent =
    `Γ* = ${r.gamma_star.toPrecision(5)}, ξ* = ${r.xi_star.toPrecision(5)}`;
  plot("threshold-plot", r.gamma, [
    { label: "ξ", ys: r.xi }, { label: "P_FA", ys: r.p_fa }, { label: "P_MD", ys: r.p_md },
  ], { vlines: [r.gamma_star], xlabel: "Γ", ymax: 1 });
}

await init();
document.getElementById("run-covert").onclick = runCovert;
document.getElementById("run-schemes").onclick = runSchemes;
document.getElementById("run-threshold").onclick = runThreshold;
runCovert();
runSchemes();
runThreshold();
