// Built with `wasm-pack build --target web --out-dir www/pkg` from crates/demo.
import init, { modelCurves, peakAge, simulatedCurve } from "./pkg/impact_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

function plot(canvas, xs, ys, title, marker) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#000";
  ctx.fillText(title, pad, 14);
  if (ys.length === 0) return;
  const xMax = Math.max(...xs);
  const yMax = Math.max(...ys) || 1;
  const px = (x) => pad + (x / xMax) * (w - 2 * pad);
  const py = (y) => h - pad + 20 - (y / yMax) * (h - 2 * pad);
  ctx.strokeStyle = "#888";
  ctx.beginPath();
  ctx.moveTo(pad, py(0));
  ctx.lineTo(w - pad, py(0));
  ctx.moveTo(pad, py(0));
  ctx.lineTo(pad, py(yMax));
  ctx.stroke();
  ctx.fillText(yMax.toPrecision(3), 2, py(yMax) + 4);
  ctx.fillText(xMax.toPrecision(4), w - pad - 10, py(0) + 14);
  ctx.strokeStyle = "#1f5fa8";
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(px(x), py(ys[i])) : ctx.moveTo(px(x), py(ys[i]))));
  ctx.stroke();
  if (marker !== undefined) {
    ctx.strokeStyle = "#c33";
    ctx.beginPath();
    ctx.moveTo(px(marker), py(0));
    ctx.lineTo(px(marker), py(yMax));
    ctx.stroke();
  }
}

function params() {
  return [num("c"), num("alpha"), num("epsilon"), num("s")];
}

function showOutputs() {
  for (const out of document.querySelectorAll("output")) {
    out.value = $(out.htmlFor.value).value;
  }
}

function redrawModel() {
  showOutputs();
  $("error").textContent = "";
  try {
    const curves = modelCurves(...params(), num("tmax"), 800);
    const [tStar, g] = peakAge(...params());
    $("peak").textContent = `peak age ${tStar.toFixed(3)}, G at peak ${g.toPrecision(5)}`;
    plot($("cumulative"), curves.t, curves.cumulative, "F(t)");
    plot($("perFollower"), curves.t, curves.perFollower, "G_s(t)", tStar <= num("tmax") ? tStar : undefined);
  } catch (e) {
    $("error").textContent = String(e);
  }
}

function simulate() {
  $("error").textContent = "";
  try {
    const ys = simulatedCurve(
      num("c"), num("alpha"), num("s"),
      num("users"), num("weeks"), BigInt($("seed").value || 0), $("normalize").checked,
    );
    const xs = Array.from(ys, (_, i) => i + 1);
    plot($("simulated"), xs, Array.from(ys), "simulated weekly median (running average of 5)");
  } catch (e) {
    $("error").textContent = String(e);
  }
}

await init();
for (const input of document.querySelectorAll("input[type=range]")) {
  input.addEventListener("input", redrawModel);
}
$("simulate").addEventListener("click", simulate);
redrawModel();
simulate();
