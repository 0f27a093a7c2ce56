/**
 * Small self-contained force layout: spring links, grid-binned repulsion,
 * mild centering. No rendering here; graph-render.ts owns the SVG.
 */

export interface SimNode {
  id: string;
  x: number;
  y: number;
  vx: number;
  vy: number;
  pinned: boolean;
}

export interface SimEdge {
  source: number; // index into nodes
  target: number;
}

export interface ForceOptions {
  width: number;
  height: number;
  linkDistance: number;
  linkStrength: number;
  repulsion: number;
  damping: number;
}

const DEFAULTS: ForceOptions = {
  width: 800,
  height: 600,
  linkDistance: 40,
  linkStrength: 0.04,
  repulsion: 900,
  damping: 0.85,
};

export class ForceLayout {
  nodes: SimNode[];
  edges: SimEdge[];
  opts: ForceOptions;

  constructor(
    ids: string[],
    edgePairs: { source: string; target: string }[],
    opts: Partial<ForceOptions> = {},
  ) {
    this.opts = { ...DEFAULTS, ...opts };
    const { width, height } = this.opts;
    // deterministic phyllotaxis start so layouts are reproducible
    this.nodes = ids.map((id, i) => {
      const angle = i * 2.39996; // golden angle
      const radius = 10 * Math.sqrt(i + 1);
      return {
        id,
        x: width / 2 + radius * Math.cos(angle),
        y: height / 2 + radius * Math.sin(angle),
        vx: 0,
        vy: 0,
        pinned: false,
      };
    });
    const index = new Map(ids.map((id, i) => [id, i]));
    this.edges = edgePairs
      .filter((e) => index.has(e.source) && index.has(e.target))
      .map((e) => ({ source: index.get(e.source)!, target: index.get(e.target)! }));
  }

  step(): void {
    const { linkDistance, linkStrength, repulsion, damping, width, height } = this.opts;
    const nodes = this.nodes;

    // springs along edges
    for (const e of this.edges) {
      const a = nodes[e.source];
      const b = nodes[e.target];
      const dx = b.x - a.x;
      const dy = b.y - a.y;
      const dist = Math.hypot(dx, dy) || 1e-6;
      const force = (dist - linkDistance) * linkStrength;
      const fx = (dx / dist) * force;
      const fy = (dy / dist) * force;
      a.vx += fx;
      a.vy += fy;
      b.vx -= fx;
      b.vy -= fy;
    }

    // repulsion between near neighbors via grid binning (O(n))
    const cell = linkDistance * 2;
    const bins = new Map<string, number[]>();
    nodes.forEach((n, i) => {
      const key = `${Math.floor(n.x / cell)}:${Math.floor(n.y / cell)}`;
      const bin = bins.get(key);
      if (bin) bin.push(i);
      else bins.set(key, [i]);
    });
    nodes.forEach((n, i) => {
      const cx = Math.floor(n.x / cell);
      const cy = Math.floor(n.y / cell);
      for (let gx = cx - 1; gx <= cx + 1; gx++) {
        for (let gy = cy - 1; gy <= cy + 1; gy++) {
          const bin = bins.get(`${gx}:${gy}`);
          if (!bin) continue;
          for (const j of bin) {
            if (j <= i) continue;
            const m = nodes[j];
            const dx = m.x - n.x;
            const dy = m.y - n.y;
            const d2 = dx * dx + dy * dy || 1e-4;
            if (d2 > cell * cell * 4) continue;
            const f = repulsion / d2;
            const d = Math.sqrt(d2);
            const fx = (dx / d) * f;
            const fy = (dy / d) * f;
            n.vx -= fx;
            n.vy -= fy;
            m.vx += fx;
            m.vy += fy;
          }
        }
      }
    });

    // gentle pull to the canvas center
    for (const n of nodes) {
      n.vx += (width / 2 - n.x) * 0.002;
      n.vy += (height / 2 - n.y) * 0.002;
      if (!n.pinned) {
        n.vx *= damping;
        n.vy *= damping;
        n.x += n.vx;
        n.y += n.vy;
      } else {
        n.vx = 0;
        n.vy = 0;
      }
    }
  }

  /** total speed; rendering can stop ticking once this settles */
  energy(): number {
    return this.nodes.reduce((s, n) => s + Math.abs(n.vx) + Math.abs(n.vy), 0);
  }
}
