/** Glue: one store, full re-render on every state change. */

import { ApiClient } from "./api.js";
import { SessionStore } from "./store.js";
import { Handlers, renderApp } from "./views.js";

export function mountApp(root: HTMLElement, client: ApiClient): SessionStore {
  const store = new SessionStore(client);
  const handlers: Handlers = {
    onTriage: (itemId, decision) => store.track(() => store.triage(itemId, decision)),
    onEdit: (edit) => store.track(() => store.editCluster(edit)),
    onApply: () => store.track(() => store.requestApply()),
  };
  const render = () => {
    root.replaceChildren(renderApp(store.state, handlers));
  };
  store.subscribe(render);
  render();
  store.track(() => store.load());
  return store;
}
