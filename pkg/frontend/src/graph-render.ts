/**
 * SVG renderer for the referral network: force layout, node dragging,
 * wheel zoom, background pan, and the role legend.
 */

import { ForceLayout } from "./force.js";
import type { NetworkViewModel } from "./dashboard.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface RenderHandle {
  stop(): void;
  layout: ForceLayout;
}

export function renderNetwork(
  container: HTMLElement,
  model: NetworkViewModel,
  width = 840,
  height = 560,
): RenderHandle {
  container.textContent = "";

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));
  let view = { x: 0, y: 0, w: width, h: height };
  const applyView = () =>
    svg.setAttribute("viewBox", `${view.x} ${view.y} ${view.w} ${view.h}`);
  applyView();
  container.appendChild(svg);

  if (model.sampled) {
    const note = document.createElement("p");
    note.className = "sample-note";
    note.textContent =
      `Showing a sampled view (${model.nodes.length} of ${model.totalNodes} nodes).`;
    container.appendChild(note);
  }

  const layout = new ForceLayout(
    model.nodes.map((n) => n.id),
    model.edges,
    { width, height },
  );

  const edgeLines = model.edges.map(() => {
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("stroke", "#bbb");
    line.setAttribute("stroke-width", "1");
    svg.appendChild(line);
    return line;
  });

  const byId = new Map(layout.nodes.map((n) => [n.id, n]));
  const circles = model.nodes.map((n) => {
    const c = document.createElementNS(SVG_NS, "circle");
    c.setAttribute("r", n.role === "staff-root" ? "9" : "5");
    c.setAttribute("fill", n.color);
    c.setAttribute("data-id", n.id);
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `${n.id} (${n.role})`;
    c.appendChild(title);
    svg.appendChild(c);
    return c;
  });

  const draw = () => {
    model.edges.forEach((e, i) => {
      const a = byId.get(e.source)!;
      const b = byId.get(e.target)!;
      edgeLines[i].setAttribute("x1", String(a.x));
      edgeLines[i].setAttribute("y1", String(a.y));
      edgeLines[i].setAttribute("x2", String(b.x));
      edgeLines[i].setAttribute("y2", String(b.y));
    });
    model.nodes.forEach((n, i) => {
      const sim = byId.get(n.id)!;
      circles[i].setAttribute("cx", String(sim.x));
      circles[i].setAttribute("cy", String(sim.y));
    });
  };

  let running = true;
  let ticks = 0;
  const tick = () => {
    if (!running) return;
    layout.step();
    draw();
    ticks += 1;
    if (ticks < 600 && layout.energy() > 0.5) requestAnimationFrame(tick);
  };
  requestAnimationFrame(tick);

  // node dragging
  let dragging: string | null = null;
  const toWorld = (evt: PointerEvent) => {
    const rect = svg.getBoundingClientRect();
    return {
      x: view.x + ((evt.clientX - rect.left) / rect.width) * view.w,
      y: view.y + ((evt.clientY - rect.top) / rect.height) * view.h,
    };
  };
  svg.addEventListener("pointerdown", (evt) => {
    const target = evt.target as Element;
    const id = target.getAttribute?.("data-id");
    if (id) {
      dragging = id;
      byId.get(id)!.pinned = true;
      svg.setPointerCapture(evt.pointerId);
    } else {
      dragging = "__pan__";
    }
  });
  svg.addEventListener("pointermove", (evt) => {
    if (dragging === null) return;
    if (dragging === "__pan__") {
      const rect = svg.getBoundingClientRect();
      view.x -= (evt.movementX / rect.width) * view.w;
      view.y -= (evt.movementY / rect.height) * view.h;
      applyView();
      return;
    }
    const sim = byId.get(dragging)!;
    const p = toWorld(evt);
    sim.x = p.x;
    sim.y = p.y;
    draw();
  });
  svg.addEventListener("pointerup", () => {
    if (dragging && dragging !== "__pan__") byId.get(dragging)!.pinned = false;
    dragging = null;
  });

  // wheel zoom about the pointer
  svg.addEventListener("wheel", (evt) => {
    evt.preventDefault();
    const factor = evt.deltaY > 0 ? 1.15 : 1 / 1.15;
    const p = toWorld(evt as unknown as PointerEvent);
    view = {
      x: p.x - (p.x - view.x) * factor,
      y: p.y - (p.y - view.y) * factor,
      w: view.w * factor,
      h: view.h * factor,
    };
    applyView();
  });

  return {
    stop() {
      running = false;
    },
    layout,
  };
}

export function renderLegend(container: HTMLElement, legend: Record<string, string>): void {
  container.textContent = "";
  const list = document.createElement("ul");
  list.className = "legend";
  for (const [role, color] of Object.entries(legend)) {
    const item = document.createElement("li");
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.backgroundColor = color;
    item.appendChild(swatch);
    item.appendChild(document.createTextNode(` ${role}`));
    list.appendChild(item);
  }
  container.appendChild(list);
}
