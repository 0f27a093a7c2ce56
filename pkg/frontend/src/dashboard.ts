/**
 * Dashboard view-model builders. Every number shown comes straight from
 * an API response; nothing is recomputed client-side.
 */

import type {
  LedgerEntry,
  LedgerResponse,
  NetworkResponse,
  Table1Response,
  TestResultDoc,
} from "./api.js";

export const TABLE1_ROW_ORDER = ["snp_recruits", "direct", "indirect", "other_members", "total"];
export const TABLE1_COL_ORDER = ["users", "proposal_authors", "finalists", "winners"];

export const ROW_LABELS: Record<string, string> = {
  snp_recruits: "Contest new member recruits",
  direct: "→ directly recruited",
  indirect: "→ indirectly recruited",
  other_members: "Other members",
  total: "TOTAL members",
};

export const COL_LABELS: Record<string, string> = {
  users: "Users",
  proposal_authors: "Proposal Authors",
  finalists: "Finalists",
  winners: "Winners",
};

export interface Table1Panel {
  rowOrder: string[];
  colOrder: string[];
  /** cell values exactly as the API returned them */
  cells: Record<string, Record<string, number>>;
}

export function buildTable1Panel(parsed: Table1Response): Table1Panel {
  const cells: Record<string, Record<string, number>> = {};
  for (const row of Object.keys(parsed.rows)) {
    cells[row] = {};
    for (const col of Object.keys(parsed.rows[row])) {
      cells[row][col] = parsed.rows[row][col];
    }
  }
  return { rowOrder: [...TABLE1_ROW_ORDER], colOrder: [...TABLE1_COL_ORDER], cells };
}

/** Re-serialize panel cells in API key order; byte-identical to the response. */
export function serializePanelCells(panel: Table1Panel): string {
  return JSON.stringify({ rows: panel.cells });
}

/** Cells render with String(); no locale or rounding applied. */
export function formatCell(value: number): string {
  return String(value);
}

export interface NetworkViewModel {
  nodes: { id: string; role: string; color: string }[];
  edges: { source: string; target: string }[];
  counts: Record<string, number>;
  legend: Record<string, string>;
  sampled: boolean;
  totalNodes: number;
}

/**
 * Networks beyond maxNodes get a deterministic sampled view (every k-th
 * node, edges restricted to retained endpoints); tens of thousands of
 * points are not interactively renderable.
 */
export function buildNetworkModel(net: NetworkResponse, maxNodes = 5000): NetworkViewModel {
  let nodes = net.nodes;
  let sampled = false;
  if (nodes.length > maxNodes) {
    const stride = Math.ceil(nodes.length / maxNodes);
    nodes = nodes.filter((_, i) => i % stride === 0);
    sampled = true;
  }
  const kept = new Set(nodes.map((n) => n.id));
  const edges = net.edges.filter((e) => kept.has(e.source) && kept.has(e.target));
  return {
    nodes: nodes.map((n) => ({ id: n.id, role: n.role, color: n.color })),
    edges: edges.map((e) => ({ source: e.source, target: e.target })),
    counts: net.counts,
    legend: net.legend,
    sampled,
    totalNodes: net.nodes.length,
  };
}

/** The published figure's legend: clickers blue, link creators red. */
export function legendIsCanonical(legend: Record<string, string>): boolean {
  return legend["clicker"] === "blue" && legend["link-creator"] === "red";
}

export interface TestRow {
  name: string;
  method: string;
  statistic: string;
  df: string;
  pValue: string;
  error: string | null;
}

/** Three-decimal presentation; raw values stay in the API payload. */
export function formatP(p: number): string {
  return p < 0.001 ? "< .001" : p.toFixed(3).replace(/^0\./, ".");
}

export function buildTestsPanel(tests: Record<string, TestResultDoc>): TestRow[] {
  return Object.entries(tests).map(([name, doc]) => ({
    name,
    method: doc.method ?? "",
    statistic:
      doc.statistic === null || doc.statistic === undefined ? "" : doc.statistic.toFixed(2),
    df: doc.df === null || doc.df === undefined ? "" : String(doc.df),
    pValue: doc.p_value === undefined ? "" : formatP(doc.p_value),
    error: doc.error ?? null,
  }));
}

export interface PayoutRow {
  participantId: string;
  amount: string;
  amountMinorUnits: number;
}

export interface PayoutPanel {
  rows: PayoutRow[];
  /** totals row comes from the API's total field, not a client-side sum */
  total: string;
  totalMinorUnits: number;
  currency: string;
}

export function buildPayoutPanel(ledger: LedgerResponse): PayoutPanel {
  const rows = [...ledger.entries]
    .sort((a: LedgerEntry, b: LedgerEntry) =>
      b.amount_minor_units - a.amount_minor_units ||
      a.participant_id.localeCompare(b.participant_id))
    .map((e) => ({
      participantId: e.participant_id,
      amount: e.amount,
      amountMinorUnits: e.amount_minor_units,
    }));
  return {
    rows,
    total: ledger.total,
    totalMinorUnits: ledger.total_minor_units,
    currency: ledger.currency,
  };
}
