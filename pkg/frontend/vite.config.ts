/// <reference types="vitest/config" />
import { defineConfig } from "vite";

// The dev server proxies /api and /health to a locally running service, so
// the app works same-origin out of the box; a different backend can still
// be targeted through the base-URL meta tag in index.html.
const backend = process.env.CLDFORGE_API ?? "http://127.0.0.1:8000";

export default defineConfig({
  server: {
    proxy: {
      "/api": backend,
      "/health": backend,
    },
  },
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
    testTimeout: 30000,
    hookTimeout: 60000,
  },
});
