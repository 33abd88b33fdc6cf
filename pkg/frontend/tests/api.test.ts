import { describe, expect, it } from "vitest";

import { Api, ApiError } from "../src/api.js";

function capture(status = 200, body: unknown = { ok: true }) {
  const seen: { url?: string; init?: RequestInit } = {};
  const api = new Api("http://h", async (url, init) => {
    seen.url = url;
    seen.init = init;
    return new Response(JSON.stringify(body), { status });
  });
  return { api, seen };
}

describe("Api", () => {
  it("forms endpoint urls and methods", async () => {
    const { api, seen } = capture();
    await api.formulas("abc");
    expect(seen.url).toBe("http://h/sessions/abc/formulas");
    expect(seen.init?.method).toBeUndefined();

    await api.select("abc", 3, 1);
    expect(seen.url).toBe("http://h/sessions/abc/formulas/3/selection");
    expect(seen.init?.method).toBe("POST");
    expect(JSON.parse(String(seen.init?.body))).toEqual({ index: 1 });
  });

  it("passes the dobrackets style through on export", async () => {
    const { api, seen } = capture();
    await api.export("abc", "parens");
    expect(JSON.parse(String(seen.init?.body))).toEqual({ dobrackets_style: "parens" });
    await api.export("abc");
    expect(JSON.parse(String(seen.init?.body))).toEqual({});
  });

  it("raises ApiError with the service's code", async () => {
    const { api } = capture(409, { error: { code: "pending_ambiguities", message: "nope" } });
    await expect(api.export("abc")).rejects.toMatchObject({
      code: "pending_ambiguities",
      status: 409,
    });
    await expect(api.export("abc")).rejects.toBeInstanceOf(ApiError);
  });
});
