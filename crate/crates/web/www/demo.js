// Built with: wasm-pack build crates/web --target web --out-dir www/pkg
import init, { Demo } from "./pkg/humannav_web.js";

const $ = (id) => document.getElementById(id);
const ctx = $("view").getContext("2d");
const BADGE = { occupied: "#d33", visible: "#e90", isolated: "#a3c", unaffected: "#bbb" };

let demo = null;
let scene = null;
let classes = {};
let overlay = [];
let agent = null;
let timer = null;

function fit() {
  const xs = scene.nodes.map((n) => n.x);
  const ys = scene.nodes.map((n) => n.y);
  const [x0, x1, y0, y1] = [Math.min(...xs), Math.max(...xs), Math.min(...ys), Math.max(...ys)];
  const s = 700 / Math.max(x1 - x0, y1 - y0, 1);
  return (x, y) => [30 + (x - x0) * s, 730 - (y - y0) * s];
}

function draw() {
  const frame = Number($("frame").value);
  const f = JSON.parse(demo.frame(frame, Number($("radius").value)));
  const at = fit();
  const pos = Object.fromEntries(scene.nodes.map((n) => [n.id, at(n.x, n.y)]));
  const occupied = new Set(f.occupied);
  ctx.clearRect(0, 0, 760, 760);
  ctx.strokeStyle = "#ddd";
  ctx.lineWidth = 1;
  for (const [a, b] of scene.edges) {
    ctx.beginPath();
    ctx.moveTo(...pos[a]);
    ctx.lineTo(...pos[b]);
    ctx.stroke();
  }
  for (const { path, color } of overlay) {
    ctx.strokeStyle = color;
    ctx.lineWidth = 4;
    ctx.beginPath();
    path.forEach((id, i) => (i ? ctx.lineTo(...pos[id]) : ctx.moveTo(...pos[id])));
    ctx.stroke();
  }
  for (const n of scene.nodes) {
    ctx.fillStyle = $("badges").checked ? BADGE[classes[n.id]] : occupied.has(n.id) ? "#d33" : "#555";
    ctx.beginPath();
    ctx.arc(...pos[n.id], 3.5, 0, 2 * Math.PI);
    ctx.fill();
  }
  ctx.fillStyle = "rgba(220,50,50,.6)";
  for (const h of f.humans) {
    ctx.beginPath();
    ctx.arc(...at(h.x, h.y), 6, 0, 2 * Math.PI);
    ctx.fill();
  }
  if (agent) {
    ctx.fillStyle = "#2a7";
    ctx.beginPath();
    ctx.arc(...pos[agent], 8, 0, 2 * Math.PI);
    ctx.fill();
  }
  $("frame-out").textContent = frame;
}

function report(v) {
  $("out").textContent = typeof v === "string" ? v : JSON.stringify(v, null, 1);
}

function generate() {
  clearInterval(timer);
  try {
    demo = new Demo(Number($("seed").value));
  } catch (e) {
    return report(String(e));
  }
  scene = JSON.parse(demo.scene());
  classes = JSON.parse(demo.classes());
  overlay = [];
  agent = null;
  $("episode").innerHTML = scene.episodes
    .map((e, i) => `<option value="${i}">${e.id}: ${e.start} to ${e.goal}</option>`)
    .join("");
  report({ scenario: scene.id, viewpoints: scene.nodes.length, humans: scene.humans.length });
  draw();
}

function compare() {
  const e = scene.episodes[Number($("episode").value)];
  const c = JSON.parse(demo.compare_plans(e.start, e.goal, Number($("frame").value)));
  overlay = [
    { path: c.unaware.path, color: "#888" },
    { path: c.aware.path, color: "#2a7" },
  ];
  agent = null;
  report({ excluded: c.excluded, unaware_cost: c.unaware.cost, aware_cost: c.aware.cost, reached_goal: c.aware.reached_goal });
  draw();
}

function run() {
  clearInterval(timer);
  let r;
  try {
    r = JSON.parse(demo.run_episode(Number($("episode").value), $("policy").value, $("mode").value, Number($("seed").value)));
  } catch (e) {
    return report(String(e));
  }
  overlay = [{ path: [r.start, ...r.steps.map((s) => s.node)], color: "#2a7" }];
  let i = 0;
  agent = r.start;
  $("frame").value = r.start_frame % 120;
  draw();
  timer = setInterval(() => {
    if (i >= r.steps.length) {
      clearInterval(timer);
      return report({ steps: r.steps.length, total_reward: r.total_reward, collisions: r.collisions, goal_distance: r.goal_distance });
    }
    const s = r.steps[i++];
    agent = s.node;
    $("frame").value = s.frame % 120;
    report(`step ${i}: ${s.action} -> ${s.node} (frame ${s.frame}, reward ${s.reward.toFixed(2)})`);
    draw();
  }, 250);
}

await init();
$("generate").onclick = generate;
$("compare").onclick = compare;
$("run").onclick = run;
for (const id of ["frame", "radius", "badges"]) $(id).oninput = () => scene && draw();
generate();
