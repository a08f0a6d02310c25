import init, {
  compare_sequences,
  compare_runtime,
  infonce_temperature_sweep,
  catalog_pairs,
} from "./pkg/asmsearch_wasm.js";

const $ = (id) => document.getElementById(id);
const fmt = (x) => (typeof x === "number" ? x.toFixed(6) : String(x));

function call(target, f) {
  try {
    return JSON.parse(f());
  } catch (e) {
    target.innerHTML = `<p class="err">${String(e.message ?? e)}</p>`;
    return null;
  }
}

function table(rows) {
  return "<table>" + rows.map((r) => "<tr>" + r.map((c) => `<td>${c}</td>`).join("") + "</tr>").join("") + "</table>";
}

function loadPreset(pairs) {
  const p = pairs[$("preset").value];
  $("asm-a").value = p.original;
  $("asm-b").value = $("use-mutant").checked ? p.mutant : p.equivalent;
}

function scoreSequences() {
  const out = $("seq-out");
  const v = call(out, () => compare_sequences($("asm-b").value, $("asm-a").value));
  if (!v) return;
  out.innerHTML =
    table([["BLEU", fmt(v.bleu)], ["ROUGE-L", fmt(v.rouge_l)], ["METEOR", fmt(v.meteor)]]) +
    `<pre>A: ${v.reference_tokens.join(" ")}\nB: ${v.candidate_tokens.join(" ")}</pre>`;
}

function runRuntime() {
  const out = $("rt-out");
  const v = call(out, () =>
    compare_runtime($("asm-a").value, $("asm-b").value, +$("seed").value, +$("seeds").value, +$("cap").value),
  );
  if (!v) return;
  const yes = (b) => (b ? "yes" : "no");
  const rows = [["seed", "rax", "rsp/rbp", "trace", "score"]].concat(
    v.per_seed.map((s) => [s.seed, yes(s.score.rax_equal), yes(s.score.stack_equal), yes(s.score.trace_equal), fmt(s.score.value)]),
  );
  const show = (t) =>
    `halt ${t.halt} after ${t.executed} instructions, rax ${t.rax}\n` +
    t.events.map((e) => `${e.kind.padEnd(5)} ${e.address} [${e.size}] = ${e.value}`).join("\n");
  out.innerHTML =
    `<p>mean score ${fmt(v.mean)}</p>` +
    table(rows) +
    `<div class="pair"><pre>A, first seed\n${show(v.trace_a)}</pre><pre>B, first seed\n${show(v.trace_b)}</pre></div>`;
}

function plot(points, logN) {
  const W = 640, H = 260, P = 36;
  const xs = points.map((p) => Math.log10(p.temperature));
  const ys = points.map((p) => p.total);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const y1 = Math.max(...ys, 2 * logN) * 1.05;
  const sx = (x) => P + ((x - x0) / (x1 - x0)) * (W - 2 * P);
  const sy = (y) => H - P - (y / y1) * (H - 2 * P);
  const path = xs.map((x, i) => `${i ? "L" : "M"}${sx(x).toFixed(1)},${sy(ys[i]).toFixed(1)}`).join("");
  return `<svg width="${W}" height="${H}">
    <line x1="${P}" y1="${sy(2 * logN)}" x2="${W - P}" y2="${sy(2 * logN)}" stroke="#aaa" stroke-dasharray="4"/>
    <text x="${W - P}" y="${sy(2 * logN) - 4}" font-size="11" text-anchor="end">2 ln n</text>
    <path d="${path}" fill="none" stroke="#1565c0" stroke-width="2"/>
    <text x="${P}" y="${H - 8}" font-size="11">T = ${points[0].temperature}</text>
    <text x="${W - P}" y="${H - 8}" font-size="11" text-anchor="end">T = ${points[points.length - 1].temperature}</text>
    <text x="4" y="14" font-size="11">L1 + L2</text>
  </svg>`;
}

function runSweep() {
  const out = $("sweep-out");
  const v = call(out, () =>
    infonce_temperature_sweep(+$("n").value, +$("d").value, +$("align").value, $("cosine").checked, 0.01, 100, 60),
  );
  if (!v) return;
  const at = v.points.reduce((best, p) => (Math.abs(Math.log(p.temperature / 0.07)) < Math.abs(Math.log(best.temperature / 0.07)) ? p : best));
  out.innerHTML = plot(v.points, v.log_n) + `<p>near T = 0.07: L1 ${fmt(at.l1)}, L2 ${fmt(at.l2)}</p>`;
}

await init();
const pairs = JSON.parse(catalog_pairs());
pairs.forEach((p, i) => $("preset").add(new Option(p.name, i)));
$("preset").onchange = $("use-mutant").onchange = () => loadPreset(pairs);
$("align").oninput = () => ($("align-v").textContent = $("align").value);
$("run-seq").onclick = scoreSequences;
$("run-rt").onclick = runRuntime;
$("run-sweep").onclick = runSweep;
loadPreset(pairs);
scoreSequences();
runRuntime();
runSweep();
