import { readFileSync } from "node:fs";

export function fixture<T>(name: string): T {
  const url = new URL(`../../tests/fixtures/${name}.json`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf8")) as T;
}

export function fixtureText(name: string): string {
  const url = new URL(`../../tests/fixtures/${name}`, import.meta.url);
  return readFileSync(url, "utf8");
}
