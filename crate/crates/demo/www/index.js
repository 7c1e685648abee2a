import init, { drop_curve, grover_curve, simulate } from "./pkg/qsparse_demo.js";

const $ = (id) => document.getElementById(id);

function plot(canvas, series, xs) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 30;
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, 8, w - pad - 8, h - pad - 8);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.fillText("1", 12, 14);
  ctx.fillText("0", 12, h - pad);
  const x = (i) => pad + (i / Math.max(1, xs.length - 1)) * (w - pad - 8);
  const y = (v) => h - pad - v * (h - pad - 8);
  xs.forEach((label, i) => ctx.fillText(String(label), x(i) - 3, h - 12));
  for (const { values, color } of series) {
    ctx.strokeStyle = color;
    ctx.beginPath();
    values.forEach((v, i) => (i ? ctx.lineTo(x(i), y(v)) : ctx.moveTo(x(i), y(v))));
    ctx.stroke();
    ctx.fillStyle = color;
    values.forEach((v, i) => ctx.fillRect(x(i) - 2, y(v) - 2, 4, 4));
  }
}

function guard(out, f) {
  out.classList.remove("error");
  try {
    f();
  } catch (e) {
    out.classList.add("error");
    out.textContent = String(e.message ?? e);
  }
}

function runDrop() {
  const out = $("drop-out");
  guard(out, () => {
    const rows = JSON.parse(drop_curve(Number($("drop-n").value), Number($("drop-limit").value)));
    plot($("drop-plot"), [{ values: rows.map((r) => r.infidelity), color: "#c33" }], rows.map((r) => r.r));
    out.textContent = rows
      .map((r) => `r=${r.r}  peak ${r.peak_support}  infidelity ${r.infidelity.toFixed(6)}`)
      .join("\n");
  });
}

function runGrover() {
  const out = $("grover-out");
  guard(out, () => {
    const rows = JSON.parse(grover_curve(Number($("grover-r").value), Number($("grover-t").value)));
    plot(
      $("grover-plot"),
      [
        { values: rows.map((r) => r.analytic), color: "#999" },
        { values: rows.map((r) => r.simulated), color: "#36c" },
      ],
      rows.map((r) => r.iterations),
    );
    out.textContent = rows
      .map((r) => `t=${r.iterations}  simulated ${r.simulated.toFixed(6)}  formula ${r.analytic.toFixed(6)}`)
      .join("\n");
  });
}

function runCircuit() {
  const out = $("sim-out");
  guard(out, () => {
    const sim = JSON.parse(simulate($("circuit").value, Number($("sim-limit").value)));
    const lines = [
      `${sim.n_qubits} qubits, ${sim.gates} gates, mixed rule picks ${sim.mixed_choice}`,
      `support ${sim.support}, dropped mass ${sim.dropped_mass.toFixed(6)}`,
      ...sim.top.map((e) => `${e.ket}  ${e.re.toFixed(6)} ${e.im >= 0 ? "+" : "-"} ${Math.abs(e.im).toFixed(6)}i  p=${e.probability.toFixed(6)}`),
    ];
    out.textContent = lines.join("\n");
  });
}

await init();
$("drop-run").onclick = runDrop;
$("grover-run").onclick = runGrover;
$("sim-run").onclick = runCircuit;
runDrop();
runGrover();
runCircuit();
