import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    // the integration test spawns the review server and waits for it
    testTimeout: 60_000,
    hookTimeout: 60_000,
  },
});
