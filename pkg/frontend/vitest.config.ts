import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    globalSetup: "./tests/global-setup.ts",
    include: ["tests/**/*.test.ts"],
    // the e2e suite trains a small model and drives a live server
    testTimeout: 30000,
    hookTimeout: 120000,
  },
});
