/**
 * End-to-end acceptance against live service processes:
 *   A11 - landing flow: consent + email => share URL whose token resolves
 *         through the redirect to a recorded click.
 *   A12 - dashboard fidelity: table panel byte-identical to the stats API;
 *         the 4-person demo network renders 4 nodes / 3 edges with the
 *         canonical legend colors.
 *
 * Two separate services keep the flows isolated: A11 drives a fresh
 * contest; A12 reads a pre-seeded demo-chain log.
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import {
  buildNetworkModel,
  buildPayoutPanel,
  buildTable1Panel,
  legendIsCanonical,
  serializePanelCells,
} from "../src/dashboard.js";
import { initialViewModel, submitEmail } from "../src/landing.js";

const LIVE_PORT = 21000 + (process.pid % 1000) * 2;
const DEMO_PORT = LIVE_PORT + 1;
const LIVE = `http://127.0.0.1:${LIVE_PORT}`;
const DEMO = `http://127.0.0.1:${DEMO_PORT}`;
const children: ChildProcess[] = [];

async function waitForService(base: string): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const res = await fetch(`${base}/api/stats/summary`);
      if (res.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  throw new Error(`service at ${base} did not come up`);
}

function serve(events: string, port: number): void {
  children.push(
    spawn(
      "python3",
      ["-m", "snp.cli", "serve", "--events", events, "--port", String(port)],
      { stdio: "pipe", env: { ...process.env, SNP_SALT: "e2e-salt" } },
    ),
  );
}

beforeAll(async () => {
  const dir = mkdtempSync(join(tmpdir(), "snp-e2e-"));
  const demoEvents = join(dir, "demo.jsonl");
  const seeded = spawnSync(
    "python3",
    ["-m", "snp.cli", "fixture", "--out", demoEvents, "--scale", "figure1"],
    { stdio: "pipe" },
  );
  if (seeded.status !== 0) {
    throw new Error(`fixture seeding failed: ${seeded.stderr}`);
  }
  serve(join(dir, "live.jsonl"), LIVE_PORT);
  serve(demoEvents, DEMO_PORT);
  await Promise.all([waitForService(LIVE), waitForService(DEMO)]);
}, 60_000);

afterAll(() => {
  for (const child of children) child.kill();
});

describe("A11 landing flow", () => {
  it("consented email submission yields a share URL whose token records a click", async () => {
    const sharer = new ApiClient(LIVE, { jar: true });
    await sharer.land(); // visitor cookie

    const before = (await sharer.summary()).clickers;

    let vm = { ...initialViewModel(), consentGiven: true, emailInput: "frida@example.org" };
    vm = await submitEmail(sharer, vm);
    expect(vm.errorBanner).toBeNull();
    expect(vm.issuedShareUrl).toMatch(/\/r\/[A-Za-z0-9_-]+$/);

    // a brand-new visitor follows the share link
    const friend = new ApiClient(LIVE, { jar: true });
    const res = await friend.request(vm.issuedShareUrl!.slice(LIVE.length));
    expect(res.status).toBe(302);
    expect(friend.cookieHeader()).toContain("snp_visitor=");

    const after = await sharer.summary();
    expect(after.clickers).toBe(before + 1);

    // attribution recorded: the friend joins as a recruit referred by a
    // sharer who was not herself a member (two degrees out)
    const member = await friend.registerMember();
    const clsRes = await friend.request(
      `/api/participants/${member.member_id}/classification`,
    );
    const cls = (await clsRes.json()) as { kind: string; degrees_from_established: number };
    expect(cls.kind).toBe("indirect_recruit");
    expect(cls.degrees_from_established).toBe(2);
  });

  it("unconsented submissions never produce a URL", async () => {
    const client = new ApiClient(LIVE, { jar: true });
    await client.land();
    const vm = await submitEmail(client, {
      ...initialViewModel(),
      consentGiven: false,
      emailInput: "ok@example.org",
    });
    expect(vm.issuedShareUrl).toBeNull();
  });
});

describe("A12 dashboard fidelity", () => {
  it("table panel is byte-identical to the stats endpoint", async () => {
    const api = new ApiClient(DEMO, { jar: true });
    const { raw, parsed } = await api.table1();
    const panel = buildTable1Panel(parsed);
    expect(serializePanelCells(panel)).toBe(raw);
    // dave is the one registered member in the demo chain
    expect(panel.cells.snp_recruits.users).toBe(1);
  });

  it("demo chain renders 4 nodes, 3 edges, canonical colors", async () => {
    const api = new ApiClient(DEMO, { jar: true });
    const model = buildNetworkModel(await api.network());
    expect(model.nodes.length).toBe(4);
    expect(model.edges.length).toBe(3);
    expect(legendIsCanonical(model.legend)).toBe(true);
    const colorOf = (id: string) => model.nodes.find((n) => n.id === id)?.color;
    expect(colorOf("alice")).toBe("red"); // created a link
    expect(colorOf("dave")).toBe("green"); // recruited member
    for (const node of model.nodes) {
      expect(node.color).toBe(model.legend[node.role]);
    }
  });

  it("network counts panel equals the summary endpoint", async () => {
    const api = new ApiClient(DEMO, { jar: true });
    const [model, summary] = await Promise.all([
      api.network().then((n) => buildNetworkModel(n)),
      api.summary(),
    ]);
    for (const key of ["clickers", "link_creators", "new_recruits", "direct", "indirect"]) {
      expect(model.counts[key]).toBe((summary as unknown as Record<string, number>)[key]);
    }
  });

  it("payout preview panel mirrors the API ledger", async () => {
    const api = new ApiClient(DEMO, { jar: true });
    const ledger = await api.payoutPreview(["dave"], {
      winner_award: 2000,
      chain_base: 1000,
      decay: 0.5,
    });
    const panel = buildPayoutPanel(ledger);
    expect(panel.rows.map((r) => [r.participantId, r.amount])).toEqual([
      ["dave", "2000.00"],
      ["carol", "1000.00"],
      ["bob", "500.00"],
      ["alice", "250.00"],
    ]);
    expect(panel.total).toBe(ledger.total);
  });
});
