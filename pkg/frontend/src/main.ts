// Boot: attach to (or create) a server session, mount the tab bar, and
// route via the URL hash so sessions are shareable: #/<session-id>/<tab>.

import { ApiClient } from "./api.js";
import { fromServerFlags, newSessionView, type SessionView } from "./state.js";
import { h } from "./render.js";
import { TABS, TAB_RENDERERS, TAB_STAGE, type TabContext, type TabId } from "./tabs.js";

const api = new ApiClient(window.location.origin);

function parseHash(): { sessionId: string | null; tab: TabId } {
  const match = window.location.hash.match(/^#\/([^/]+)(?:\/([^/]+))?/);
  const tab = (match?.[2] as TabId) || "upload";
  return {
    sessionId: match?.[1] ?? null,
    tab: TABS.some((t) => t.id === tab) ? tab : "upload",
  };
}

async function attachSession(): Promise<SessionView> {
  const { sessionId } = parseHash();
  if (sessionId) {
    try {
      const status = await api.sessionStatus(sessionId);
      return fromServerFlags(status.session_id, status.has_dataset, status.stages);
    } catch {
      /* expired or unknown: fall through to a fresh session */
    }
  }
  const created = await api.createSession();
  return newSessionView(created.session_id);
}

function mount(view: SessionView): void {
  const root = document.getElementById("app")!;
  const context: TabContext = { api, view, rerender: () => render() };

  function render(): void {
    const { tab } = parseHash();
    window.location.hash = `#/${view.sessionId}/${tab}`;
    const nav = h("nav", { class: "tab-bar" },
      ...TABS.map((t) => {
        const stage = TAB_STAGE[t.id];
        const classes = ["tab"];
        if (t.id === tab) classes.push("active");
        if (stage && view.stale.has(stage)) classes.push("stale");
        return h("button", {
          class: classes.join(" "),
          onclick: () => {
            window.location.hash = `#/${view.sessionId}/${t.id}`;
          },
        }, t.label, stage && view.stale.has(stage) ? h("span", { class: "stale-dot" }, "•") : null);
      }));
    const panel = TAB_RENDERERS[tab](context);
    root.replaceChildren(
      h("header", {},
        h("h1", {}, "caseflow"),
        h("span", { class: "session-tag" }, `session ${view.sessionId.slice(0, 8)}`)),
      nav,
      panel,
    );
  }

  window.addEventListener("hashchange", render);
  render();
}

attachSession().then(mount).catch((error) => {
  document.getElementById("app")!.textContent =
    `Could not reach the analysis service: ${error}`;
});
