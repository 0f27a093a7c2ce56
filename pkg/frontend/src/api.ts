/**
 * Typed client for the contest service HTTP API.
 *
 * In the browser the visitor cookie rides along automatically
 * (same-origin credentials); in node tests a tiny cookie jar stands in.
 */

export interface LinkResponse {
  token: string;
  share_url: string;
}

export type Table1Rows = Record<string, Record<string, number>>;

export interface Table1Response {
  rows: Table1Rows;
}

export interface TestResultDoc {
  method?: string;
  statistic?: number | null;
  df?: number | null;
  p_value?: number;
  table?: number[] | null;
  error?: string;
  source?: string;
}

export interface SummaryResponse {
  clickers: number;
  link_creators: number;
  new_recruits: number;
  direct: number;
  indirect: number;
  members: number;
  participants: number;
  proposals: number;
  events: number;
  state_hash: string;
}

export interface NetworkNode {
  id: string;
  role: string;
  color: string;
  clicked: boolean;
  link_creator: boolean;
  member: boolean;
}

export interface NetworkEdge {
  source: string;
  target: string;
}

export interface NetworkResponse {
  directed: boolean;
  nodes: NetworkNode[];
  edges: NetworkEdge[];
  counts: Record<string, number>;
  legend: Record<string, string>;
}

export interface LedgerEntry {
  participant_id: string;
  amount_minor_units: number;
  amount: string;
}

export interface LedgerResponse {
  currency: string;
  total_minor_units: number;
  total: string;
  entries: LedgerEntry[];
  preview?: boolean;
  within_bound?: boolean;
}

export interface ScheduleOverrides {
  winner_award?: number | string;
  chain_base?: number | string;
  decay?: number | string;
  min_unit?: number | string;
  max_depth?: number | null;
}

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export interface ApiClientOptions {
  /** keep cookies manually (node test environments) */
  jar?: boolean;
  fetchImpl?: typeof fetch;
}

export class ApiClient {
  private cookies = new Map<string, string>();
  private fetchImpl: typeof fetch;

  constructor(public baseUrl = "", private opts: ApiClientOptions = {}) {
    this.fetchImpl = opts.fetchImpl ?? fetch;
  }

  cookieHeader(): string {
    return [...this.cookies.entries()].map(([k, v]) => `${k}=${v}`).join("; ");
  }

  private storeCookies(res: Response): void {
    if (!this.opts.jar) return;
    const setCookies: string[] =
      (res.headers as any).getSetCookie?.() ??
      (res.headers.get("set-cookie") ? [res.headers.get("set-cookie") as string] : []);
    for (const line of setCookies) {
      const [pair] = line.split(";");
      const eq = pair.indexOf("=");
      if (eq > 0) this.cookies.set(pair.slice(0, eq).trim(), pair.slice(eq + 1).trim());
    }
  }

  async request(path: string, init: RequestInit = {}): Promise<Response> {
    const headers = new Headers(init.headers);
    if (this.opts.jar && this.cookies.size) headers.set("cookie", this.cookieHeader());
    const res = await this.fetchImpl(this.baseUrl + path, {
      credentials: this.opts.jar ? undefined : "same-origin",
      redirect: "manual",
      ...init,
      headers,
    });
    this.storeCookies(res);
    return res;
  }

  private async json<T>(path: string, init: RequestInit = {}): Promise<T> {
    const res = await this.request(path, init);
    if (!res.ok) {
      let detail = res.statusText;
      try {
        const body = await res.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(res.status, detail);
    }
    return (await res.json()) as T;
  }

  /** GET the landing page so the service issues a visitor cookie. */
  async land(): Promise<void> {
    await this.request("/");
  }

  createLink(email: string, consent: boolean, staff = false): Promise<LinkResponse> {
    return this.json<LinkResponse>("/api/links", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ email, consent, staff }),
    });
  }

  registerMember(): Promise<{ member_id: string }> {
    return this.json("/api/members", { method: "POST" });
  }

  summary(): Promise<SummaryResponse> {
    return this.json("/api/stats/summary");
  }

  /** Raw body + parsed rows, so callers can verify byte fidelity. */
  async table1(): Promise<{ raw: string; parsed: Table1Response }> {
    const res = await this.request("/api/stats/table1");
    if (!res.ok) throw new ApiError(res.status, res.statusText);
    const raw = await res.text();
    return { raw, parsed: JSON.parse(raw) as Table1Response };
  }

  tests(): Promise<Record<string, TestResultDoc>> {
    return this.json("/api/stats/tests");
  }

  network(): Promise<NetworkResponse> {
    return this.json("/api/network?format=json");
  }

  payoutPreview(winners: string[], schedule?: ScheduleOverrides): Promise<LedgerResponse> {
    return this.json("/api/payouts/preview", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(schedule ? { winners, schedule } : { winners }),
    });
  }
}
