import init, { iris_demo, arm_demo, smoothing_demo } from "./pkg/distraction_web.js";

const $ = (id) => document.getElementById(id);
const CLASS_COLORS = ["#d62728", "#ff7f0e", "#9467bd", "#2ca02c", "#1f77b4"];

function grayCanvas(values, w, h, scale, caption) {
  const c = document.createElement("canvas");
  c.width = w * scale;
  c.height = h * scale;
  const ctx = c.getContext("2d");
  let lo = Infinity, hi = -Infinity;
  for (const v of values) { lo = Math.min(lo, v); hi = Math.max(hi, v); }
  const span = hi > lo ? hi - lo : 1;
  const img = ctx.createImageData(w, h);
  values.forEach((v, i) => {
    const g = Math.round(255 * (v - lo) / span);
    img.data.set([g, g, g, 255], 4 * i);
  });
  const tmp = document.createElement("canvas");
  tmp.width = w; tmp.height = h;
  tmp.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(tmp, 0, 0, c.width, c.height);
  const wrap = document.createElement("div");
  wrap.append(c);
  const cap = document.createElement("div");
  cap.className = "cap";
  cap.textContent = caption;
  wrap.append(cap);
  return { wrap, ctx, scale };
}

function mark(ctx, scale, x, y, color, r = 4) {
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.arc((x + 0.5) * scale, (y + 0.5) * scale, r, 0, 2 * Math.PI);
  ctx.stroke();
}

function dots(ctx, scale, pts, color) {
  ctx.fillStyle = color;
  for (const [x, y] of pts) ctx.fillRect(x * scale, y * scale, scale, scale);
}

function runIris() {
  const r = JSON.parse(iris_demo(+$("iris-seed").value, +$("iris-noise").value, $("iris-open").checked));
  const out = $("iris-out");
  out.replaceChildren();
  if (r.error) { $("iris-text").textContent = r.error; return; }
  const n = r.size;
  const main = grayCanvas(r.pixels, n, n, 4, "patch");
  if (r.truth) mark(main.ctx, 4, r.truth[0], r.truth[1], "#2ca02c", 6);
  mark(main.ctx, 4, r.center[0], r.center[1], "#d62728");
  out.append(main.wrap);
  const names = ["hough", "gabor", "separability", "combined"];
  names.forEach((k, i) => {
    const v = grayCanvas(r[k], n, n, 2, k);
    const p = i < 3 ? r.peaks[i] : r.center;
    mark(v.ctx, 2, p[0], p[1], "#d62728", 3);
    out.append(v.wrap);
  });
  const truth = r.truth ? `truth (${r.truth[0].toFixed(1)}, ${r.truth[1].toFixed(1)}), ` : "closed eye, ";
  $("iris-text").textContent = `${truth}estimate (${r.center[0]}, ${r.center[1]}), combined score ${r.score.toFixed(3)}`;
}

function runArm() {
  const r = JSON.parse(arm_demo(+$("arm-class").value, +$("arm-seed").value));
  const out = $("arm-out");
  out.replaceChildren();
  if (r.error) { out.textContent = r.error; return; }
  const depth = r.depth.map((d) => (d === 0 ? 2500 : -d));
  const f = grayCanvas(depth, r.width, r.height, 4, "frontal: contour (yellow), kept right side (red)");
  dots(f.ctx, 4, r.contour, "#e6c200");
  dots(f.ctx, 4, r.kept, "#d62728");
  out.append(f.wrap);
  const ph = r.profile_mask.length / r.profile_width;
  const p = grayCanvas(r.profile_mask, r.profile_width, ph, 4, "profile (row vs depth): kept front rim (red)");
  dots(p.ctx, 4, r.profile_contour, "#e6c200");
  dots(p.ctx, 4, r.profile_kept, "#d62728");
  out.append(p.wrap);
}

function runSmoothing() {
  const w = +$("smooth-window").value;
  $("smooth-wlabel").textContent = w;
  const r = JSON.parse(smoothing_demo(+$("smooth-seed").value, 900, w));
  if (r.error) return;
  const c = $("smooth-signal"), ctx = c.getContext("2d");
  ctx.clearRect(0, 0, c.width, c.height);
  const n = r.raw.length, lo = -4, hi = 8;
  const X = (t) => (t / (n - 1)) * c.width;
  const Y = (v) => c.height - ((v - lo) / (hi - lo)) * c.height;
  const line = (vals, color, width = 1) => {
    ctx.strokeStyle = color; ctx.lineWidth = width; ctx.beginPath();
    vals.forEach((v, t) => (t ? ctx.lineTo(X(t), Y(v)) : ctx.moveTo(X(t), Y(v))));
    ctx.stroke();
  };
  line(r.raw, "#bbb");
  line(r.median.map((m, t) => m + r.std[t]), "#9ecae1");
  line(r.median.map((m, t) => m - r.std[t]), "#9ecae1");
  line(r.median, "#1f77b4", 2);
  const l = $("smooth-labels"), lc = l.getContext("2d");
  lc.clearRect(0, 0, l.width, l.height);
  const bw = l.width / n;
  r.labels.forEach((k, t) => { lc.fillStyle = CLASS_COLORS[k]; lc.fillRect(t * bw, 0, Math.ceil(bw), 30); });
  r.filtered.forEach((k, t) => { lc.fillStyle = CLASS_COLORS[k]; lc.fillRect(t * bw, 40, Math.ceil(bw), 30); });
}

init().then(() => {
  $("status").textContent = "";
  $("iris-run").onclick = runIris;
  $("arm-run").onclick = runArm;
  $("arm-class").onchange = runArm;
  $("smooth-window").oninput = runSmoothing;
  $("smooth-seed").onchange = runSmoothing;
  runIris();
  runArm();
  runSmoothing();
}).catch((e) => { $("status").textContent = `Failed to load: ${e}`; });
