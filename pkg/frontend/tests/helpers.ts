import { readFileSync } from "node:fs";

export function fixture<T = any>(name: string): T {
  const url = new URL(`./fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf8")) as T;
}

/** Minimal fetch stand-in: route -> response body. POST routes match on
 * url plus a stable stringification of the request body. */
export function mockFetch(routes: Map<string, unknown>) {
  const calls: { url: string; body?: unknown }[] = [];
  const fn = async (url: string, init?: RequestInit): Promise<Response> => {
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    calls.push({ url, body });
    const key = body === undefined ? url : `${url} ${JSON.stringify(body)}`;
    if (!routes.has(key)) {
      return new Response(JSON.stringify({ detail: `no route for ${key}` }),
                          { status: 404 });
    }
    return new Response(JSON.stringify(routes.get(key)), { status: 200 });
  };
  return { fn, calls };
}
