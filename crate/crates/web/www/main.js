import init, { spectrum, riskCurves, staircase } from "./pkg/gegenkrr_web.js";

const PAD = 40;

function frame(canvas, xMin, xMax, yMin, yMax, logX) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const w = canvas.width - 2 * PAD;
  const h = canvas.height - 2 * PAD;
  const fx = logX ? Math.log : (v) => v;
  const sx = (x) => PAD + ((fx(x) - fx(xMin)) / (fx(xMax) - fx(xMin))) * w;
  const sy = (y) => PAD + h - ((y - yMin) / (yMax - yMin)) * h;
  ctx.strokeStyle = "#999";
  ctx.strokeRect(PAD, PAD, w, h);
  ctx.fillStyle = "#555";
  ctx.fillText(xMin.toPrecision(3), PAD, canvas.height - PAD + 14);
  ctx.fillText(xMax.toPrecision(3), PAD + w - 24, canvas.height - PAD + 14);
  ctx.fillText(yMax.toPrecision(3), 4, PAD + 4);
  ctx.fillText(yMin.toPrecision(3), 4, PAD + h);
  return { ctx, sx, sy };
}

function line(plot, xs, ys, color) {
  const { ctx, sx, sy } = plot;
  ctx.strokeStyle = color;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  xs.forEach((x, i) => (i === 0 ? ctx.moveTo(sx(x), sy(ys[i])) : ctx.lineTo(sx(x), sy(ys[i]))));
  ctx.stroke();
}

function value(id) {
  return Number(document.getElementById(id).value);
}

function drawSpectrum() {
  const info = document.getElementById("sp-info");
  try {
    const v = spectrum(value("sp-d"), value("sp-psi"), BigInt(value("sp-seed")));
    const ev = v.eigenvalues;
    const grid = v.grid;
    const dens = v.density;
    const xMax = grid[grid.length - 1] + (grid[1] - grid[0]) / 2;
    const bins = 40;
    const width = xMax / bins;
    const counts = new Array(bins).fill(0);
    let atZero = 0;
    for (const e of ev) {
      if (v.atom > 0 && e < 1e-8) { atZero++; continue; }
      counts[Math.min(bins - 1, Math.max(0, Math.floor(e / width)))]++;
    }
    const hist = counts.map((c) => c / (ev.length * width));
    const yMax = Math.max(...dens, ...hist) * 1.1;
    const plot = frame(document.getElementById("sp-canvas"), 0, xMax, 0, yMax, false);
    plot.ctx.fillStyle = "#bbb";
    hist.forEach((c, i) => {
      const x0 = plot.sx(i * width);
      plot.ctx.fillRect(x0, plot.sy(c), plot.sx((i + 1) * width) - x0 - 1, plot.sy(0) - plot.sy(c));
    });
    line(plot, grid, dens, "#c33");
    info.className = "";
    info.textContent = `n = ${v.n}, KS distance ${v.ks.toFixed(4)}` +
      (v.atom > 0 ? `, atom at 0: ${v.atom.toFixed(3)} (observed ${(atZero / ev.length).toFixed(3)})` : "");
  } catch (e) {
    info.className = "err";
    info.textContent = e.message;
  }
}

function drawRisk() {
  const zeta = Math.pow(10, value("rc-zeta"));
  const sigma = value("rc-sigma");
  document.getElementById("rc-info").textContent = `zeta = ${zeta.toPrecision(3)}, sigma^2 = ${sigma}`;
  const c = riskCurves(zeta, sigma);
  const yMax = Math.max(...c.total) * 1.1;
  const plot = frame(document.getElementById("rc-canvas"), c.x[0], c.x[c.x.length - 1], 0, yMax, true);
  line(plot, c.x, c.bias, "#36c");
  line(plot, c.x, c.variance, "#c33");
  line(plot, c.x, c.total, "#222");
}

function drawStaircase() {
  const status = document.getElementById("status");
  try {
    const c = staircase(value("st-d"), value("st-f1"), value("st-f2"), value("st-f3"), value("st-zeta"), value("st-sigma"));
    const yMax = Math.max(...c.total, 1e-12) * 1.1;
    const plot = frame(document.getElementById("st-canvas"), c.x[0], c.x[c.x.length - 1], 0, yMax, false);
    line(plot, c.x, c.total, "#222");
    status.textContent = "";
  } catch (e) {
    status.className = "err";
    status.textContent = e.message;
  }
}

await init();
document.getElementById("sp-run").addEventListener("click", drawSpectrum);
for (const id of ["rc-zeta", "rc-sigma"]) document.getElementById(id).addEventListener("input", drawRisk);
for (const id of ["st-d", "st-f1", "st-f2", "st-f3", "st-zeta", "st-sigma"]) {
  document.getElementById(id).addEventListener("input", drawStaircase);
}
drawSpectrum();
drawRisk();
drawStaircase();
