import init, { DemoSession } from "./pkg/mo_tracking_demo.js";

const $ = (id) => document.getElementById(id);
const status = (text) => { $("status").textContent = text; };

let session = null;
let fronts = { wsm: [], rpm: [] };
let marks = [];
let view = null;

function setup() {
  const level = Number($("level").value);
  session?.free();
  session = new DemoSession(level, $("falling").checked, Number($("lambda1").value), Number($("lambda2").value));
  fronts = { wsm: [], rpm: [] };
  marks = [];
  view = null;
  clear($("control"));
  drawObjectives();
  status(`level ${level} assembled`);
}

function clear(canvas) {
  canvas.getContext("2d").clearRect(0, 0, canvas.width, canvas.height);
}

// Blue for the lower bound -7, red for the upper bound 15.
function colour(v) {
  const t = Math.min(1, Math.max(0, (v + 7) / 22));
  return `rgb(${Math.round(255 * t)},${Math.round(90 + 80 * (1 - Math.abs(2 * t - 1)))},${Math.round(255 * (1 - t))})`;
}

function drawControl(values) {
  const canvas = $("control");
  const ctx = canvas.getContext("2d");
  const tri = session.triangles();
  const s = canvas.width;
  clear(canvas);
  for (let t = 0; t < values.length; t++) {
    const v = tri.subarray(6 * t, 6 * t + 6);
    ctx.fillStyle = colour(values[t]);
    ctx.beginPath();
    ctx.moveTo(v[0] * s, (1 - v[1]) * s);
    ctx.lineTo(v[2] * s, (1 - v[3]) * s);
    ctx.lineTo(v[4] * s, (1 - v[5]) * s);
    ctx.closePath();
    ctx.fill();
    ctx.strokeStyle = ctx.fillStyle;
    ctx.stroke();
  }
  const obs = session.observations();
  ctx.fillStyle = "#000";
  for (let k = 0; k < obs.length; k += 3) {
    ctx.beginPath();
    ctx.arc(obs[k] * s, (1 - obs[k + 1]) * s, 4, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function points() {
  const all = [...fronts.wsm, ...fronts.rpm];
  for (const m of marks) all.push(m.j1, m.j2, ...(m.zeta ?? []));
  return all;
}

function updateView() {
  const p = points();
  if (p.length === 0) return;
  let [x0, x1, y0, y1] = [Infinity, -Infinity, Infinity, -Infinity];
  for (let k = 0; k < p.length; k += 2) {
    x0 = Math.min(x0, p[k]); x1 = Math.max(x1, p[k]);
    y0 = Math.min(y0, p[k + 1]); y1 = Math.max(y1, p[k + 1]);
  }
  const padX = 0.1 * (x1 - x0 || 1);
  const padY = 0.1 * (y1 - y0 || 1);
  view = { x0: x0 - padX, x1: x1 + padX, y0: y0 - padY, y1: y1 + padY };
}

function toCanvas(j1, j2) {
  const c = $("objectives");
  return [((j1 - view.x0) / (view.x1 - view.x0)) * c.width, (1 - (j2 - view.y0) / (view.y1 - view.y0)) * c.height];
}

function drawObjectives() {
  const canvas = $("objectives");
  const ctx = canvas.getContext("2d");
  clear(canvas);
  if (!view) return;
  ctx.fillStyle = "#444";
  ctx.fillText(`j1 ${view.x0.toFixed(2)} .. ${view.x1.toFixed(2)}`, 6, canvas.height - 6);
  ctx.fillText(`j2 ${view.y0.toFixed(2)} .. ${view.y1.toFixed(2)}`, 6, 12);
  const dots = (flat, style, r) => {
    ctx.fillStyle = style;
    for (let k = 0; k < flat.length; k += 2) {
      const [x, y] = toCanvas(flat[k], flat[k + 1]);
      ctx.beginPath();
      ctx.arc(x, y, r, 0, 2 * Math.PI);
      ctx.fill();
    }
  };
  dots(fronts.wsm, "#1f77b4", 3);
  dots(fronts.rpm, "#d62728", 3);
  for (const m of marks) {
    dots([m.j1, m.j2], "#2ca02c", 5);
    if (m.zeta) {
      dots(m.zeta, "#000", 3);
      const [a, b] = toCanvas(...m.zeta);
      const [c, d] = toCanvas(m.j1, m.j2);
      ctx.strokeStyle = "#000";
      ctx.beginPath(); ctx.moveTo(a, b); ctx.lineTo(c, d); ctx.stroke();
    }
  }
}

function show(sol, label, zeta) {
  drawControl(sol.control);
  marks.push({ j1: sol.j1, j2: sol.j2, zeta });
  if (!view) updateView();
  drawObjectives();
  status(`${label}: j = (${sol.j1.toFixed(5)}, ${sol.j2.toFixed(5)}), ${sol.iterations} iterations, converged ${sol.converged}`);
  sol.free();
}

function guarded(f) {
  return (...args) => {
    try { f(...args); } catch (e) { status(`error: ${e.message ?? e}`); }
  };
}

$("setup").onclick = guarded(setup);
$("alpha").oninput = () => { $("alphaValue").textContent = Number($("alpha").value).toFixed(2); };
$("wsm").onclick = guarded(() => {
  const a = Number($("alpha").value);
  show(session.solveWsm(a), `weighted sum alpha = (${a.toFixed(2)}, ${(1 - a).toFixed(2)})`);
});
$("front").onclick = guarded(() => {
  fronts.wsm = session.wsmFront(30);
  fronts.rpm = session.rpmFront(15);
  updateView();
  drawObjectives();
  status(`weighted sum: ${fronts.wsm.length / 2} points (blue), reference point: ${fronts.rpm.length / 2} points (red)`);
});
$("objectives").onclick = guarded((ev) => {
  if (!view) return;
  const c = $("objectives");
  const r = c.getBoundingClientRect();
  const z1 = view.x0 + ((ev.clientX - r.left) / c.width) * (view.x1 - view.x0);
  const z2 = view.y0 + (1 - (ev.clientY - r.top) / c.height) * (view.y1 - view.y0);
  show(session.solveRpm(z1, z2), `reference point (${z1.toFixed(3)}, ${z2.toFixed(3)})`, [z1, z2]);
});

await init();
guarded(setup)();
