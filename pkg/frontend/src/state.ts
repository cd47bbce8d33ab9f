/** Session state: bearer token plus the logged-in user, persisted locally. */

import type { User } from "./api";

const STORAGE_KEY = "greengrid.session";

export interface Session {
  token: string;
  user: User;
}

type Listener = (session: Session | null) => void;

export class SessionStore {
  private session: Session | null = null;
  private listeners: Listener[] = [];

  constructor(private readonly storage: Storage | null = defaultStorage()) {
    const raw = this.storage?.getItem(STORAGE_KEY);
    if (raw) {
      try {
        this.session = JSON.parse(raw) as Session;
      } catch {
        this.storage?.removeItem(STORAGE_KEY);
      }
    }
  }

  get current(): Session | null {
    return this.session;
  }

  set(session: Session | null): void {
    this.session = session;
    if (session) {
      this.storage?.setItem(STORAGE_KEY, JSON.stringify(session));
    } else {
      this.storage?.removeItem(STORAGE_KEY);
    }
    for (const listener of this.listeners) listener(session);
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }
}

function defaultStorage(): Storage | null {
  try {
    return typeof localStorage === "undefined" ? null : localStorage;
  } catch {
    return null;
  }
}
