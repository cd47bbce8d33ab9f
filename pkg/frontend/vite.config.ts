import { defineConfig } from "vite";

export default defineConfig({
  build: { outDir: "dist" },
  server: {
    proxy: { "/api": "http://127.0.0.1:8000", "/healthz": "http://127.0.0.1:8000" },
  },
  test: {
    environment: "jsdom",
    testTimeout: 60000,
    hookTimeout: 60000,
  },
});
