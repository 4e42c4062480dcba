/** Defeater/scenario toggling.
 *
 * Toggle off: capture the authored records, retract the defeater (the
 * service cascades its edges), re-run inference, refetch. Toggle on:
 * re-post the captured records, re-run inference, refetch. The flag display
 * after each toggle comes entirely from the final /case response, and the
 * off-then-on pair restores the prior display exactly.
 */

import type { ApiClient } from "./api.js";
import { applyCaseResponse, type ViewState } from "./state.js";
import type { ElementRecord, RelationshipRecord } from "./types.js";

export interface RetractedScenario {
  element: ElementRecord;
  edges: RelationshipRecord[];
}

export class ScenarioToggle {
  private retracted = new Map<string, RetractedScenario>();

  constructor(private readonly client: ApiClient) {}

  isActive(id: string, state: ViewState): boolean {
    if (this.retracted.has(id)) return false;
    return Boolean(state.document?.elements.some((e) => e.id === id));
  }

  /** Deactivate: remember the authored records, retract, re-infer, refetch. */
  async toggleOff(state: ViewState, id: string): Promise<ViewState> {
    const authored = (await this.client.getCase("authored")).data;
    const element = authored.elements.find((e) => e.id === id);
    if (!element) throw new Error(`unknown element ${id}`);
    const edges = authored.relationships.filter((r) => r.subject === id || r.object === id);
    this.retracted.set(id, { element, edges });
    await this.client.deleteElement(id);
    await this.client.infer();
    return applyCaseResponse(state, await this.client.getCase());
  }

  /** Reactivate: re-assert the captured records, re-infer, refetch. */
  async toggleOn(state: ViewState, id: string): Promise<ViewState> {
    const kept = this.retracted.get(id);
    if (!kept) throw new Error(`nothing retracted under ${id}`);
    await this.client.postElement(kept.element);
    for (const edge of kept.edges) {
      await this.client.postEdge(edge);
    }
    await this.client.infer();
    this.retracted.delete(id);
    return applyCaseResponse(state, await this.client.getCase());
  }
}
