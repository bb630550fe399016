import init, { polygon_spectrum, paradox, disk_spectra } from "./pkg/dbs_web.js";

const status = document.getElementById("status");
const fmt = (v) => (Math.abs(v) < 1e-3 && v !== 0 ? v.toExponential(3) : v.toFixed(8));
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

function table(headers, rows) {
  const head = "<tr>" + headers.map((h) => `<th>${h}</th>`).join("") + "</tr>";
  const body = rows.map((r) => "<tr>" + r.map((c) => `<td>${c}</td>`).join("") + "</tr>").join("");
  return `<table>${head}${body}</table>`;
}

function guarded(fn) {
  return (event) => {
    event.preventDefault();
    status.textContent = "";
    try {
      fn(new FormData(event.target));
    } catch (e) {
      status.textContent = String(e);
    }
  };
}

function drawPolygon(vertices) {
  const c = document.getElementById("polygon-canvas");
  const g = c.getContext("2d");
  const extent = Math.max(1, ...vertices.map(([x, y]) => Math.hypot(x, y)));
  const s = (c.width / 2 - 10) / extent;
  g.clearRect(0, 0, c.width, c.height);
  g.save();
  g.translate(c.width / 2, c.height / 2);
  g.scale(s, -s);
  g.lineWidth = 1.5 / s;
  g.strokeStyle = "#999";
  g.beginPath();
  g.arc(0, 0, 1, 0, 2 * Math.PI);
  g.stroke();
  g.strokeStyle = "#1f77b4";
  g.fillStyle = "rgba(31, 119, 180, 0.15)";
  g.beginPath();
  vertices.forEach(([x, y], i) => (i ? g.lineTo(x, y) : g.moveTo(x, y)));
  g.closePath();
  g.fill();
  g.stroke();
  g.restore();
}

function onPolygon(f) {
  const r = JSON.parse(polygon_spectrum(+f.get("k"), f.get("mode"), +f.get("degree"), +f.get("n")));
  drawPolygon(r.vertices);
  const rows = r.values.map((v, i) => [i + 1, fmt(v), r.disk_dbs[i], r.disk_mdbs[i]]);
  document.getElementById("polygon-out").innerHTML =
    table(["n", "δ_n(P)", "λ_n(D)", "μ_n(D)"], rows) +
    `<p>perimeter/area ${fmt(r.perimeter_over_area)}; multiplicities [${r.multiplicities}]; ` +
    `retained ${r.retained_dim}, cond ${r.cond_a.toExponential(2)}</p>`;
}

function plotLog(canvas, xs, series) {
  const g = canvas.getContext("2d");
  const pad = 50;
  const w = canvas.width - 2 * pad;
  const h = canvas.height - 2 * pad;
  const ys = series.flatMap((s) => s.values).filter((v) => v > 0);
  const lo = Math.floor(Math.log10(Math.min(...ys)));
  const hi = Math.ceil(Math.log10(Math.max(...ys)));
  const lx0 = Math.log2(xs[0]);
  const lx1 = Math.log2(xs[xs.length - 1]);
  const px = (x) => pad + (lx1 > lx0 ? ((Math.log2(x) - lx0) / (lx1 - lx0)) * w : w / 2);
  const py = (y) => pad + h - ((Math.log10(Math.max(y, 10 ** lo)) - lo) / Math.max(hi - lo, 1)) * h;
  g.clearRect(0, 0, canvas.width, canvas.height);
  g.font = "11px sans-serif";
  g.strokeStyle = "#ddd";
  g.fillStyle = "#444";
  for (let e = lo; e <= hi; e++) {
    g.beginPath();
    g.moveTo(pad, py(10 ** e));
    g.lineTo(pad + w, py(10 ** e));
    g.stroke();
    g.fillText(`1e${e}`, 8, py(10 ** e) + 4);
  }
  xs.forEach((x) => g.fillText(String(x), px(x) - 8, pad + h + 16));
  g.fillText("k", pad + w / 2, pad + h + 34);
  series.forEach((s, i) => {
    g.strokeStyle = COLORS[i % COLORS.length];
    g.lineWidth = 2;
    g.beginPath();
    s.values.forEach((v, j) => (j ? g.lineTo(px(xs[j]), py(v)) : g.moveTo(px(xs[j]), py(v))));
    g.stroke();
    g.fillStyle = g.strokeStyle;
    g.fillText(s.label, pad + w + 4, py(s.values[s.values.length - 1]) + 4);
  });
}

function onParadox(f) {
  const t = JSON.parse(paradox(f.get("ks"), f.get("mode"), +f.get("degree"), +f.get("n")));
  const rows = t.rows.filter((r) => !r.failure);
  const ks = rows.map((r) => r.k);
  const n = t.config.n_max;
  const series = [...Array(n).keys()].map((i) => ({ label: `n=${i + 1}`, values: rows.map((r) => r.errors[i]) }));
  plotLog(document.getElementById("paradox-canvas"), ks, series);
  const out = t.rows.map((r) =>
    r.failure ? [r.k, "failed", ""] : [r.k, r.hausdorff.toExponential(2), r.gaps.map((v) => v.toFixed(4)).join(" ")]
  );
  document.getElementById("paradox-out").innerHTML =
    "<p>Plot: |δ_n(P_k) − λ_n(D)|. Table: δ_n(P_k) − μ_n(D).</p>" + table(["k", "Hausdorff", "gaps"], out);
}

function onDisk(f) {
  const r = JSON.parse(disk_spectra(+f.get("count")));
  const rows = r.dbs.map((v, i) => [i + 1, v, r.mdbs[i], v - r.mdbs[i]]);
  document.getElementById("disk-out").innerHTML = table(["n", "λ_n (DBS)", "μ_n (MDBS)", "difference"], rows);
}

await init();
const forms = { "polygon-form": onPolygon, "paradox-form": onParadox, "disk-form": onDisk };
for (const [id, fn] of Object.entries(forms)) {
  const form = document.getElementById(id);
  form.addEventListener("submit", guarded(fn));
  form.requestSubmit();
}
