/**
 * Typed client for the Green Grid REST API.
 *
 * Response interfaces mirror the server's JSON one-to-one; nothing here
 * computes points, distances or impact values. Every non-2xx response is the
 * uniform envelope {code, message, details?} and surfaces as ApiError.
 */

export interface ApiErrorBody {
  code: string;
  message: string;
  details?: Record<string, unknown>;
}

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;
  readonly details: Record<string, unknown>;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.status = status;
    this.code = body.code;
    this.details = body.details ?? {};
  }
}

export interface Page<T> {
  items: T[];
  limit: number;
  offset: number;
  total: number;
}

export interface User {
  id: string;
  email: string;
  display_name: string;
  role: "citizen" | "center_staff" | "admin";
  status: string;
  created_at: string;
}

export interface LoginResponse {
  token: string;
  token_type: string;
  user: User;
}

export interface GeoPointDto {
  lat: number;
  lon: number;
}

export interface Center {
  id: string;
  name: string;
  address: string;
  location: GeoPointDto;
  accepted_categories: string[];
  operating_hours: Record<string, [string, string][]>;
  contact: string;
  status: "open" | "closed" | "available" | "full";
  managed_by: string[];
  distance_km?: number;
}

export interface PreferredSlotDto {
  date: string;
  start: string;
  end: string;
}

export interface Pickup {
  id: string;
  user_id: string;
  category: string;
  estimated_weight_kg: number;
  address: string;
  location: GeoPointDto | null;
  preferred_slot: PreferredSlotDto;
  status: "requested" | "approved" | "rejected" | "collected" | "cancelled";
  assigned_center_id: string | null;
  decided_by: string | null;
  verified_weight_kg: number | null;
  created_at: string;
  updated_at: string;
}

export interface LedgerEntry {
  id: string;
  user_id: string;
  delta: number;
  kind: string;
  reference: string;
  created_at: string;
}

export interface RewardItem {
  id: string;
  name: string;
  points_cost: number;
  stock: number;
  active: boolean;
}

export interface ImpactTotalsDto {
  co2e_kg: number;
  energy_kwh: number;
  water_l: number;
  materials_kg: number;
}

export interface ImpactReport extends ImpactTotalsDto {
  breakdown: Record<string, ImpactTotalsDto>;
}

export interface ArticleSummary {
  id: string;
  title: string;
  slug: string;
  tags: string[];
  author_id: string;
  status: string;
  published_at: string | null;
  created_at: string;
}

export interface Article extends ArticleSummary {
  body: string;
}

export interface Product {
  id: string;
  title: string;
  description: string;
  category: string;
  condition: string;
  price_minor_units: number;
  stock: number;
  active: boolean;
  listed_by: string;
  created_at: string;
}

export interface OrderLine {
  product_id: string;
  quantity: number;
  unit_price_minor_units: number;
}

export interface Order {
  id: string;
  buyer_id: string;
  lines: OrderLine[];
  points_redeemed: number;
  points_discount_minor_units: number;
  total_minor_units: number;
  status: "placed" | "confirmed" | "shipped" | "delivered" | "cancelled";
  created_at: string;
}

export interface AssistantReply {
  intent: string;
  confidence: number;
  answer_text: string;
  action: Record<string, unknown> | null;
}

export interface DashboardSnapshot {
  total_users: number;
  total_centers: number;
  pending_pickups: number;
  collected_pickups: number;
  points_issued: number;
  points_redeemed: number;
  platform_impact: ImpactReport;
}

export interface NearbyQuery {
  lat: number;
  lon: number;
  radius_km: number;
  category?: string;
  status?: string[];
}

export interface CenterPayload {
  name: string;
  address?: string;
  lat: number;
  lon: number;
  accepted_categories: string[];
  operating_hours?: Record<string, [string, string][]>;
  contact?: string;
  status?: string;
}

type Json = Record<string, unknown> | undefined;

export class ApiClient {
  token: string | null = null;
  onUnauthenticated: (() => void) | null = null;

  constructor(
    readonly baseUrl: string = "",
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request<T>(method: string, path: string, body?: Json): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let envelope: ApiErrorBody;
      try {
        envelope = (await response.json()) as ApiErrorBody;
      } catch {
        envelope = { code: "error", message: response.statusText };
      }
      const error = new ApiError(response.status, envelope);
      if (error.status === 401 && error.code === "unauthenticated") {
        this.onUnauthenticated?.();
      }
      throw error;
    }
    return (await response.json()) as T;
  }

  private get<T>(path: string): Promise<T> {
    return this.request<T>("GET", path);
  }

  private post<T>(path: string, body?: Json): Promise<T> {
    return this.request<T>("POST", path, body ?? {});
  }

  // -- auth --

  register(email: string, display_name: string, password: string) {
    return this.post<{ user: User }>("/api/auth/register", { email, display_name, password });
  }

  login(email: string, password: string) {
    return this.post<LoginResponse>("/api/auth/login", { email, password });
  }

  requestPasswordReset(email: string) {
    return this.post<{ status: string }>("/api/auth/password-reset/request", { email });
  }

  createUser(email: string, display_name: string, password: string, role: string) {
    return this.post<{ user: User }>("/api/admin/users", { email, display_name, password, role });
  }

  // -- locator --

  centersNearby(query: NearbyQuery) {
    const params = new URLSearchParams({
      lat: String(query.lat),
      lon: String(query.lon),
      radius_km: String(query.radius_km),
    });
    if (query.category) params.set("category", query.category);
    for (const status of query.status ?? []) params.append("status", status);
    return this.get<{ items: Center[] }>(`/api/centers/nearby?${params}`);
  }

  createCenter(payload: CenterPayload) {
    return this.post<Center>("/api/centers", payload as unknown as Json);
  }

  updateCenter(id: string, patch: Partial<CenterPayload>) {
    return this.request<Center>("PATCH", `/api/centers/${id}`, patch as Json);
  }

  // -- pickups --

  createPickup(payload: {
    category: string;
    estimated_weight_kg: number;
    address: string;
    preferred_slot: PreferredSlotDto;
    lat?: number;
    lon?: number;
  }) {
    return this.post<Pickup>("/api/pickups", payload as unknown as Json);
  }

  myPickups(limit = 50, offset = 0) {
    return this.get<Page<Pickup>>(`/api/pickups/mine?limit=${limit}&offset=${offset}`);
  }

  pickupQueue(status?: string, limit = 50) {
    const suffix = status ? `&status=${status}` : "";
    return this.get<Page<Pickup>>(`/api/pickups?limit=${limit}${suffix}`);
  }

  decidePickup(id: string, decision: "approve" | "reject", assigned_center_id?: string) {
    return this.post<Pickup>(`/api/pickups/${id}/decision`, { decision, assigned_center_id });
  }

  collectPickup(id: string, verified_weight_kg: number) {
    return this.post<{ pickup: Pickup; ledger_entry: LedgerEntry; impact_report: ImpactReport }>(
      `/api/pickups/${id}/collect`, { verified_weight_kg });
  }

  cancelPickup(id: string) {
    return this.post<Pickup>(`/api/pickups/${id}/cancel`);
  }

  // -- rewards --

  balance() {
    return this.get<{ user_id: string; balance: number }>("/api/rewards/balance");
  }

  rewardHistory(limit = 50, offset = 0) {
    return this.get<Page<LedgerEntry>>(`/api/rewards/history?limit=${limit}&offset=${offset}`);
  }

  rewardItems(limit = 100) {
    return this.get<Page<RewardItem>>(`/api/rewards/items?limit=${limit}`);
  }

  redeem(item_id: string) {
    return this.post<{ redemption: Record<string, unknown>; balance: number }>(
      "/api/rewards/redeem", { item_id });
  }

  // -- impact --

  impactMe() {
    return this.get<ImpactReport>("/api/impact/me");
  }

  // -- articles --

  articles(limit = 50, offset = 0, tag?: string) {
    const suffix = tag ? `&tag=${encodeURIComponent(tag)}` : "";
    return this.get<Page<ArticleSummary>>(`/api/articles?limit=${limit}&offset=${offset}${suffix}`);
  }

  article(slug: string) {
    return this.get<Article>(`/api/articles/${slug}`);
  }

  createArticle(title: string, body: string, tags: string[]) {
    return this.post<ArticleSummary>("/api/articles", { title, body, tags });
  }

  publishArticle(id: string) {
    return this.post<ArticleSummary>(`/api/articles/${id}/publish`);
  }

  // -- marketplace --

  products(limit = 50, offset = 0, category?: string) {
    const suffix = category ? `&category=${category}` : "";
    return this.get<Page<Product>>(`/api/products?limit=${limit}&offset=${offset}${suffix}`);
  }

  placeOrder(lines: { product_id: string; quantity: number }[], redeem_points = 0) {
    return this.post<Order>("/api/orders", { lines, redeem_points });
  }

  advanceOrder(id: string, next_status: string) {
    return this.post<Order>(`/api/orders/${id}/advance`, { next_status });
  }

  // -- assistant / admin / ops --

  ask(text: string, location?: GeoPointDto) {
    return this.post<AssistantReply>("/api/assistant/ask", { text, location });
  }

  dashboard() {
    return this.get<DashboardSnapshot>("/api/admin/dashboard");
  }

  healthz() {
    return this.get<{ status: string }>("/healthz");
  }
}

/**
 * Guards a view against out-of-order responses: each call claims a sequence
 * number and resolutions that are no longer the newest resolve to undefined.
 */
export function latestGuard() {
  let sequence = 0;
  return async <T>(work: Promise<T>): Promise<T | undefined> => {
    const mine = ++sequence;
    const result = await work;
    return mine === sequence ? result : undefined;
  };
}
