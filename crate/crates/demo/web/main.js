import init, { score_curve, cd_table, mine_synthetic } from "./pkg/svcmine_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const fmt = (x) => (x == null ? "-" : x.toFixed(4));

function drawCurve() {
  const r0 = num("r0");
  $("r0-out").textContent = r0.toFixed(2);
  const canvas = $("curve");
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 30;
  ctx.clearRect(0, 0, w, h);
  let points;
  try {
    points = JSON.parse(score_curve(r0, 101));
    $("curve-err").textContent = "";
  } catch (e) {
    $("curve-err").textContent = String(e);
    return;
  }
  const x = (s) => pad + s * (w - 2 * pad);
  const y = (v) => h - pad - v * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#555";
  ctx.fillText("sim", w / 2, h - 8);
  for (const v of [0, 0.5, 1]) {
    ctx.fillText(v.toFixed(1), 4, y(v) + 4);
    ctx.fillText(v.toFixed(1), x(v) - 6, h - pad + 14);
  }

  ctx.setLineDash([4, 4]);
  ctx.strokeStyle = "#888";
  ctx.beginPath();
  ctx.moveTo(x(0), y(0.7));
  ctx.lineTo(x(1), y(0.7));
  ctx.stroke();
  ctx.setLineDash([]);

  const series = [["dc", "#1f77b4"], ["div", "#d62728"], ["novel", "#2ca02c"], ["known", "#9467bd"]];
  for (const [key, color] of series) {
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    points.forEach((p, i) => (i ? ctx.lineTo(x(p.sim), y(p[key])) : ctx.moveTo(x(p.sim), y(p[key]))));
    ctx.stroke();
  }
}

function drawTable() {
  const table = $("cd");
  table.innerHTML = "<tr><th>state</th><th>env</th><th>people</th><th>ope</th><th>cd</th><th>passes</th></tr>";
  let rows;
  try {
    rows = JSON.parse(cd_table(num("eta0"), num("eta1"), num("eta2"), num("eta3"), num("zeta-cd")));
  } catch (e) {
    $("cd-summary").innerHTML = `<span class="err">${e}</span>`;
    return;
  }
  for (const r of rows) {
    const tr = table.insertRow();
    if (r.passes) tr.className = "pass";
    for (const b of r.bits) tr.insertCell().textContent = b ? "1" : "0";
    tr.insertCell().textContent = r.cd.toFixed(2);
    tr.insertCell().textContent = r.passes ? "yes" : "no";
  }
  $("cd-summary").textContent = `${rows.filter((r) => r.passes).length} of 16 vectors pass`;
}

function runMining() {
  const table = $("leads");
  table.innerHTML = "";
  const started = performance.now();
  let s;
  try {
    s = JSON.parse(mine_synthetic(num("n"), BigInt(num("seed")), num("zeta"), num("xi"), 15));
  } catch (e) {
    $("mine-summary").innerHTML = `<span class="err">${e}</span>`;
    return;
  }
  const ms = (performance.now() - started).toFixed(0);
  $("mine-summary").textContent =
    `${s.pairs} pairs in ${ms} ms. ${s.total_leads} pass the cd filter (mean cd ${fmt(s.avg_cd)}), ` +
    `${s.interesting_count} are interesting (mean ${fmt(s.avg_interestingness)}).`;
  table.innerHTML = "<tr><th>a</th><th>b</th><th>vector</th><th>direction</th><th>cd</th><th>sim</th><th>interestingness</th></tr>";
  for (const l of s.top) {
    const r = l.recognition;
    const tr = table.insertRow();
    tr.insertCell().textContent = l.service_a;
    tr.insertCell().textContent = l.service_b;
    tr.insertCell().textContent = `${r.state_dep}${r.env_dep}${r.people_dep}${r.ope_comp}`;
    tr.insertCell().textContent = r.direction;
    tr.insertCell().textContent = l.scores.cd.toFixed(2);
    tr.insertCell().textContent = fmt(l.scores.sim);
    tr.insertCell().textContent = fmt(l.scores.interestingness);
  }
}

await init();
$("r0").addEventListener("input", drawCurve);
for (const id of ["eta0", "eta1", "eta2", "eta3", "zeta-cd"]) $(id).addEventListener("input", drawTable);
$("run").addEventListener("click", runMining);
drawCurve();
drawTable();
runMining();
