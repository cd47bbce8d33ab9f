import type { ApiClient } from "./api";
import type { MapAdapter } from "./map";
import type { SessionStore } from "./state";

export interface Ctx {
  api: ApiClient;
  session: SessionStore;
  map: MapAdapter;
  navigate: (route: string) => void;
}
