import { readFileSync } from "node:fs";
export function fixture(name) {
    const url = new URL(`../../tests/fixtures/${name}.json`, import.meta.url);
    return JSON.parse(readFileSync(url, "utf8"));
}
export function fixtureText(name) {
    const url = new URL(`../../tests/fixtures/${name}`, import.meta.url);
    return readFileSync(url, "utf8");
}
