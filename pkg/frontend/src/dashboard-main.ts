/** Operator dashboard bootstrap: network view, activity table, tests, payouts. */

import { ApiClient, ApiError } from "./api.js";
import {
  COL_LABELS,
  ROW_LABELS,
  buildNetworkModel,
  buildPayoutPanel,
  buildTable1Panel,
  buildTestsPanel,
  formatCell,
} from "./dashboard.js";
import { renderLegend, renderNetwork } from "./graph-render.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function loadNetwork(api: ApiClient): Promise<void> {
  const target = el<HTMLDivElement>("network");
  try {
    const net = await api.network();
    const model = buildNetworkModel(net);
    renderNetwork(target, model);
    renderLegend(el("legend"), model.legend);
    const counts = el<HTMLDivElement>("network-counts");
    counts.textContent =
      `clicked: ${model.counts.clickers} · created links: ${model.counts.link_creators} · ` +
      `new recruits: ${model.counts.new_recruits} ` +
      `(${model.counts.direct} direct, ${model.counts.indirect} indirect)`;
  } catch {
    target.textContent = "Network unavailable.";
  }
}

async function loadTable1(api: ApiClient): Promise<void> {
  const { parsed } = await api.table1();
  const panel = buildTable1Panel(parsed);
  const table = el<HTMLTableElement>("table1");
  table.textContent = "";
  const head = table.insertRow();
  head.insertCell().textContent = "";
  for (const col of panel.colOrder) {
    head.insertCell().textContent = COL_LABELS[col] ?? col;
  }
  for (const row of panel.rowOrder) {
    const tr = table.insertRow();
    tr.insertCell().textContent = ROW_LABELS[row] ?? row;
    for (const col of panel.colOrder) {
      tr.insertCell().textContent = formatCell(panel.cells[row][col]);
    }
  }
}

async function loadTests(api: ApiClient): Promise<void> {
  const rows = buildTestsPanel(await api.tests());
  const table = el<HTMLTableElement>("tests");
  table.textContent = "";
  const head = table.insertRow();
  for (const label of ["Test", "Method", "Statistic", "df", "p"]) {
    head.insertCell().textContent = label;
  }
  for (const row of rows) {
    const tr = table.insertRow();
    tr.insertCell().textContent = row.name;
    if (row.error) {
      const cell = tr.insertCell();
      cell.colSpan = 4;
      cell.textContent = `not computable: ${row.error}`;
      continue;
    }
    tr.insertCell().textContent = row.method;
    tr.insertCell().textContent = row.statistic;
    tr.insertCell().textContent = row.df;
    tr.insertCell().textContent = row.pValue;
  }
}

function wirePayoutForm(api: ApiClient): void {
  const form = el<HTMLFormElement>("payout-form");
  const winnersInput = el<HTMLInputElement>("winners");
  const button = el<HTMLButtonElement>("preview-button");
  const message = el<HTMLDivElement>("payout-message");
  const table = el<HTMLTableElement>("payout-table");

  const winnerList = () =>
    winnersInput.value.split(/[\s,]+/).map((w) => w.trim()).filter(Boolean);

  winnersInput.addEventListener("input", () => {
    button.disabled = winnerList().length === 0;
  });
  button.disabled = true;

  form.addEventListener("submit", async (evt) => {
    evt.preventDefault();
    message.textContent = "";
    table.textContent = "";
    try {
      const ledger = await api.payoutPreview(winnerList(), {
        winner_award: el<HTMLInputElement>("winner-award").value || undefined,
        chain_base: el<HTMLInputElement>("chain-base").value || undefined,
        decay: el<HTMLInputElement>("decay").value || undefined,
      });
      const panel = buildPayoutPanel(ledger);
      const head = table.insertRow();
      head.insertCell().textContent = "Participant";
      head.insertCell().textContent = `Amount (${panel.currency})`;
      for (const row of panel.rows) {
        const tr = table.insertRow();
        tr.insertCell().textContent = row.participantId;
        tr.insertCell().textContent = row.amount;
      }
      const totals = table.insertRow();
      totals.className = "totals";
      totals.insertCell().textContent = "TOTAL";
      totals.insertCell().textContent = panel.total;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        message.textContent = `Staff can't win: ${err.detail}`;
      } else if (err instanceof ApiError) {
        message.textContent = err.detail;
      } else {
        message.textContent = "Network trouble; try again.";
      }
    }
  });
}

export async function wireDashboard(api = new ApiClient("")): Promise<void> {
  await Promise.all([loadNetwork(api), loadTable1(api), loadTests(api)]);
  wirePayoutForm(api);
}

if (typeof document !== "undefined" && document.getElementById("table1")) {
  void wireDashboard();
}
