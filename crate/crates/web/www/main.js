import init, { thresholds, sample_path, probability_curve } from "./pkg/blowup_web.js";

const PRESETS = {
  equal: `exponents.m = 1
exponents.n = 1
exponents.p = 1
exponents.q = 1
noise.k1 = 1
noise.k2 = 1
init.C1 = 1
init.C2 = 1
domain.kind = interval
domain.lengths = pi
sim.dt = 1e-3
sim.horizon = 4
sim.n_paths = 1
sim.seed = 1`,
  two_level: `exponents.m = 3
exponents.n = 1
exponents.p = 3
exponents.q = 1
noise.k1 = 1
noise.k2 = 2
init.C1 = 8
init.C2 = 8
domain.kind = interval
domain.lengths = pi
sim.dt = 1e-3
sim.horizon = 4
sim.n_paths = 1
sim.seed = 1`,
  strict_chain: `exponents.m = 7
exponents.n = 3
exponents.p = 2.2
exponents.q = 0.6
noise.k1 = 1
noise.k2 = 2
init.C1 = 16
init.C2 = 16
domain.kind = interval
domain.lengths = pi
sim.dt = 1e-3
sim.horizon = 4
sim.n_paths = 1
sim.seed = 1`,
  two_noise: `exponents.m = 3
exponents.n = 1
exponents.p = 3
exponents.q = 1
noise.k11 = 1
noise.k12 = 0.5
noise.k21 = 2
noise.k22 = 1
coeff.C11 = 1
coeff.C12 = 1
coeff.C21 = 1
coeff.C22 = 1
init.M1 = 8
init.M2 = 8
domain.kind = box
domain.lengths = pi, pi
sim.dt = 1e-3
sim.horizon = 4
sim.n_paths = 1
sim.seed = 1`,
};

const $ = (id) => document.getElementById(id);
const canvas = $("plot");
const ctx = canvas.getContext("2d");
const PAD = 40;

function show(obj, isError = false) {
  $("out").className = isError ? "err" : "";
  $("out").textContent = typeof obj === "string" ? obj : JSON.stringify(obj, null, 2);
}

function run(fn) {
  try {
    fn();
  } catch (e) {
    show(String(e.message ?? e), true);
  }
}

// Draws each series {xs, ys, color} on shared axes; `marks` are vertical lines.
function plot(series, { xmax, ymin, ymax, marks = [], hline = null }) {
  const w = canvas.width - 2 * PAD;
  const h = canvas.height - 2 * PAD;
  const sx = (x) => PAD + (x / xmax) * w;
  const sy = (y) => PAD + h - ((Math.min(Math.max(y, ymin), ymax) - ymin) / (ymax - ymin)) * h;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(PAD, PAD, w, h);
  ctx.fillStyle = "#333";
  ctx.font = "11px sans-serif";
  ctx.fillText(ymax.toPrecision(3), 2, PAD + 4);
  ctx.fillText(ymin.toPrecision(3), 2, PAD + h);
  ctx.fillText(xmax.toPrecision(3), PAD + w - 20, PAD + h + 14);
  if (hline !== null) {
    ctx.setLineDash([4, 4]);
    ctx.beginPath();
    ctx.moveTo(sx(0), sy(hline));
    ctx.lineTo(sx(xmax), sy(hline));
    ctx.stroke();
    ctx.setLineDash([]);
  }
  for (const { xs, ys, color } of series) {
    ctx.strokeStyle = color;
    ctx.beginPath();
    xs.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(ys[i])) : ctx.moveTo(sx(x), sy(ys[i]))));
    ctx.stroke();
  }
  for (const { x, color, label } of marks) {
    if (x === null || x === undefined) continue;
    ctx.strokeStyle = color;
    ctx.beginPath();
    ctx.moveTo(sx(x), PAD);
    ctx.lineTo(sx(x), PAD + h);
    ctx.stroke();
    ctx.fillStyle = color;
    ctx.fillText(label, sx(x) + 3, PAD + 12);
  }
}

function onThresholds() {
  show(JSON.parse(thresholds($("config").value)));
}

function onPath() {
  const r = JSON.parse(sample_path($("config").value, Number($("seed").value), Number($("path").value)));
  const series = [{ xs: r.t, ys: r.lower, color: "#1f77b4" }];
  if (r.upper) series.push({ xs: r.t, ys: r.upper, color: "#d62728" });
  plot(series, {
    xmax: r.horizon,
    ymin: 0,
    ymax: 2,
    hline: 1,
    marks: [
      { x: r.tau_lower, color: "#1f77b4", label: "lower" },
      { x: r.tau_ode, color: "#2ca02c", label: "ode" },
      { x: r.tau_upper, color: "#d62728", label: "upper" },
    ],
  });
  show({ tau_lower: r.tau_lower, tau_ode: r.tau_ode, tau_upper: r.tau_upper, note: "functionals divided by their thresholds; both cross at 1" });
}

function onProbability() {
  const r = JSON.parse(probability_curve($("config").value, Number($("case").value)));
  const xs = r.curve.map((p) => p[0]);
  plot([{ xs, ys: r.curve.map((p) => p[1]), color: "#9467bd" }], {
    xmax: xs[xs.length - 1],
    ymin: 0,
    ymax: 1,
    marks: [{ x: r.setup.threshold, color: "#333", label: "N" }],
  });
  show({ p_infinite: r.p_infinite, setup: r.setup });
}

await init();
$("preset").onchange = () => ($("config").value = PRESETS[$("preset").value]);
$("config").value = PRESETS.equal;
$("btn-thresholds").onclick = () => run(onThresholds);
$("btn-path").onclick = () => run(onPath);
$("btn-prob").onclick = () => run(onProbability);
