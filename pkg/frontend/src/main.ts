/**
 * Application shell: wires the palette, canvas, code panel, harvest, and
 * annotation modules to the DOM and the HTTP service. All composition
 * results come from the service; this file only routes state and events.
 */

import {
  ApiClient,
  OfflineError,
  ServiceError,
  type ApiErrorPayload,
  type Candidate,
  type ConceptView,
  type GenerateResult,
} from "./api.js";
import {
  caretOffset,
  caretPosition,
  candidateToForm,
  draftPayload,
  emptyForm,
  renderAnnotateForm,
  validateDraft,
  type DraftForm,
} from "./annotate.js";
import { renderCanvas } from "./canvas.js";
import { linesForNode, renderCodePanel, renderErrorCard } from "./codePanel.js";
import {
  GraphEditor,
  importGraph,
  serializeGraph,
  serializePositions,
  type EditResult,
} from "./graph.js";
import { renderCandidateList } from "./harvest.js";
import { buildPaletteTree, filterTree, renderPalette } from "./palette.js";

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

class App {
  private readonly api = new ApiClient(
    localStorage.getItem("cforge-api-base") ?? "",
  );
  private editor = new GraphEditor();
  private concepts: ConceptView[] = [];
  private backend = "minilang";
  private connectFrom: string | null = null;
  private connectMode = false;
  private inflight: AbortController | null = null;
  private nextNodeNumber = 1;
  private form: DraftForm = emptyForm();
  private formErrors: Record<string, string> = {};
  private formServerError: ApiErrorPayload | null = null;
  private candidate: Candidate | null = null;
  private harvested: Candidate[] = [];
  private dragging: { node: string; dx: number; dy: number } | null = null;

  async start(): Promise<void> {
    this.bindToolbar();
    this.bindCanvas();
    this.bindPalette();
    this.bindCodePanel();
    this.bindHarvest();
    this.bindAnnotate();
    this.renderAnnotate();
    await this.refreshPalette();
    this.renderCanvasView();
  }

  // -- service round trips ------------------------------------------------

  private async refreshPalette(filterQuery = ""): Promise<void> {
    try {
      const [hierarchy, concepts] = await Promise.all([
        this.api.hierarchy(),
        this.api.listConcepts(),
      ]);
      this.concepts = concepts;
      let tree = buildPaletteTree(hierarchy);
      if (filterQuery.trim()) {
        const hits = await this.api.searchConcepts(filterQuery);
        tree = filterTree(tree, new Set(hits.map((h) => h.id)));
      }
      el("palette-body").innerHTML = renderPalette(tree);
      this.setOffline(false);
    } catch (err) {
      if (err instanceof OfflineError) this.setOffline(true);
      else throw err;
    }
  }

  private async generate(): Promise<void> {
    if (this.editor.state.nodes.length === 0) {
      this.flash("add at least one node before generating");
      return;
    }
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    try {
      const result = await this.api.generate(
        this.editor.exportGraph(),
        this.backend,
        controller.signal,
      );
      this.editor.state.lastResult = result;
      this.renderCode();
      this.setOffline(false);
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") return;
      if (err instanceof ServiceError) {
        this.editor.state.lastResult = err.payload;
        this.renderCode();
      } else if (err instanceof OfflineError) {
        this.setOffline(true);
      } else {
        throw err;
      }
    } finally {
      if (this.inflight === controller) this.inflight = null;
    }
  }

  // -- rendering ------------------------------------------------------------

  private renderCanvasView(): void {
    el("canvas-host").innerHTML = renderCanvas(this.editor.state);
  }

  private renderCode(): void {
    const result = this.editor.state.lastResult;
    const host = el("code-host");
    if (!result) {
      host.innerHTML = `<p class="empty-state">Generate to see code here.</p>`;
    } else if ("source" in result) {
      host.innerHTML = renderCodePanel(result);
    } else {
      host.innerHTML = renderErrorCard(result);
    }
  }

  private renderAnnotate(): void {
    el("annotate-host").innerHTML = renderAnnotateForm(
      this.form,
      this.formErrors,
      this.formServerError,
    );
  }

  private flash(message: string): void {
    const strip = el("message-strip");
    strip.textContent = message;
    strip.classList.add("visible");
    window.setTimeout(() => strip.classList.remove("visible"), 4000);
  }

  private setOffline(offline: boolean): void {
    el("offline-banner").classList.toggle("visible", offline);
  }

  private applyEdit(result: EditResult): boolean {
    if (!result.ok) {
      this.flash(result.message);
      return false;
    }
    this.renderCanvasView();
    return true;
  }

  // -- event wiring -----------------------------------------------------------

  private bindToolbar(): void {
    el<HTMLSelectElement>("backend-select").addEventListener("change", (ev) => {
      this.backend = (ev.target as HTMLSelectElement).value;
      if (this.editor.state.lastResult) void this.generate();
    });
    el("generate-btn").addEventListener("click", () => void this.generate());
    el("undo-btn").addEventListener("click", () => {
      if (!this.editor.undo()) this.flash("nothing to undo");
      this.renderCanvasView();
      this.renderCode();
    });
    el("connect-btn").addEventListener("click", (ev) => {
      this.connectMode = !this.connectMode;
      this.connectFrom = null;
      (ev.target as HTMLElement).classList.toggle("active", this.connectMode);
    });
    el("delete-btn").addEventListener("click", () => {
      const selected = this.editor.state.selection;
      if (!selected) {
        this.flash("select a node first");
        return;
      }
      this.applyEdit(this.editor.apply({ kind: "delete", id: selected }));
    });
    el("export-btn").addEventListener("click", () => this.exportFiles());
    el<HTMLInputElement>("import-input").addEventListener("change", (ev) => {
      void this.importFiles((ev.target as HTMLInputElement).files);
    });
  }

  private exportFiles(): void {
    const save = (name: string, text: string) => {
      const url = URL.createObjectURL(
        new Blob([text], { type: "application/json" }),
      );
      const a = document.createElement("a");
      a.href = url;
      a.download = name;
      a.click();
      URL.revokeObjectURL(url);
    };
    save("graph.cmap.json", serializeGraph(this.editor.exportGraph()));
    save("graph.cmap.pos.json", serializePositions(this.editor.exportPositions()));
  }

  private async importFiles(files: FileList | null): Promise<void> {
    if (!files || files.length === 0) return;
    let graphText: string | undefined;
    let sidecarText: string | undefined;
    for (const file of Array.from(files)) {
      if (file.name.endsWith(".pos.json")) sidecarText = await file.text();
      else graphText = await file.text();
    }
    if (graphText === undefined) {
      this.flash("choose a .cmap.json file");
      return;
    }
    try {
      this.editor = importGraph(graphText, sidecarText);
      this.nextNodeNumber = this.editor.state.nodes.length + 1;
      this.renderCanvasView();
      this.renderCode();
    } catch (err) {
      this.flash((err as Error).message);
    }
  }

  private bindPalette(): void {
    el<HTMLInputElement>("palette-filter").addEventListener("input", (ev) => {
      void this.refreshPalette((ev.target as HTMLInputElement).value);
    });
    el("palette-body").addEventListener("dragstart", (ev) => {
      const item = (ev.target as HTMLElement).closest(".palette-item");
      if (!item) return;
      ev.dataTransfer?.setData(
        "text/concept-id",
        item.getAttribute("data-concept-id") ?? "",
      );
    });
    el("link-btn").addEventListener("click", () => {
      const child = el<HTMLInputElement>("link-child").value.trim();
      const parent = el<HTMLInputElement>("link-parent").value.trim();
      if (!child || !parent) {
        this.flash("link needs child and parent ids");
        return;
      }
      this.api
        .link(child, parent)
        .then(() => {
          this.flash(`linked ${child} under ${parent}`);
          return this.refreshPalette();
        })
        .catch((err) => this.reportApiError(err));
    });
  }

  private bindCanvas(): void {
    const host = el("canvas-host");
    host.addEventListener("dragover", (ev) => ev.preventDefault());
    host.addEventListener("drop", (ev) => {
      ev.preventDefault();
      const concept = ev.dataTransfer?.getData("text/concept-id");
      if (!concept) return;
      const bounds = host.getBoundingClientRect();
      const id = this.freshNodeId();
      this.applyEdit(
        this.editor.apply({
          kind: "add-node",
          id,
          concept,
          x: ev.clientX - bounds.left - 75,
          y: ev.clientY - bounds.top - 27,
        }),
      );
    });
    host.addEventListener("pointerdown", (ev) => {
      const nodeEl = (ev.target as Element).closest(".node");
      if (!nodeEl) return;
      const id = nodeEl.getAttribute("data-node-id")!;
      if (this.connectMode) {
        if (this.connectFrom === null) {
          this.connectFrom = id;
          this.flash(`connecting from ${id}; pick a target`);
        } else if (this.connectFrom !== id) {
          this.applyEdit(
            this.editor.apply({ kind: "connect", from: this.connectFrom, to: id }),
          );
          this.connectFrom = null;
        } else {
          this.applyEdit(
            this.editor.apply({ kind: "connect", from: id, to: id }),
          );
          this.connectFrom = null;
        }
        return;
      }
      this.editor.state.selection = id;
      const at = this.editor.state.positions[id]!;
      const bounds = host.getBoundingClientRect();
      this.dragging = {
        node: id,
        dx: ev.clientX - bounds.left - at.x,
        dy: ev.clientY - bounds.top - at.y,
      };
      this.renderCanvasView();
    });
    host.addEventListener("pointermove", (ev) => {
      if (!this.dragging) return;
      const bounds = host.getBoundingClientRect();
      this.editor.state.positions[this.dragging.node] = {
        x: ev.clientX - bounds.left - this.dragging.dx,
        y: ev.clientY - bounds.top - this.dragging.dy,
      };
      this.renderCanvasView();
    });
    const stopDrag = () => {
      this.dragging = null;
    };
    host.addEventListener("pointerup", stopDrag);
    host.addEventListener("pointerleave", stopDrag);

    // hovering a node highlights its lines in the code panel
    host.addEventListener("mouseover", (ev) => {
      const nodeEl = (ev.target as Element).closest(".node");
      this.highlightNode(nodeEl ? nodeEl.getAttribute("data-node-id") : null);
    });
  }

  private highlightNode(nodeId: string | null): void {
    const result = this.editor.state.lastResult;
    const lines = document.querySelectorAll<HTMLElement>(".code-line");
    if (!result || !("source" in result) || nodeId === null) {
      lines.forEach((line) => line.classList.remove("highlight"));
      return;
    }
    const range = linesForNode(result, nodeId);
    lines.forEach((line) => {
      const number = Number(line.getAttribute("data-line"));
      const hit = range !== null && number >= range[0] && number <= range[1];
      line.classList.toggle("highlight", hit);
    });
  }

  private bindCodePanel(): void {
    const host = el("code-host");
    host.addEventListener("click", (ev) => {
      const fix = (ev.target as Element).closest(".fix-binding");
      if (!fix) return;
      const applied = this.editor.apply({
        kind: "set-binding",
        node: fix.getAttribute("data-node")!,
        input: fix.getAttribute("data-input")!,
        source: fix.getAttribute("data-source")!,
      });
      if (this.applyEdit(applied)) void this.generate();
    });
    // hovering a provenance line highlights the owning canvas node
    host.addEventListener("mouseover", (ev) => {
      const line = (ev.target as Element).closest(".code-line[data-node]");
      document.querySelectorAll(".node").forEach((node) => {
        node.classList.toggle(
          "hover-linked",
          line !== null &&
            node.getAttribute("data-node-id") === line.getAttribute("data-node"),
        );
      });
    });
  }

  private bindHarvest(): void {
    el("harvest-btn").addEventListener("click", () => void this.runHarvest());
    el<HTMLInputElement>("harvest-query").addEventListener("keydown", (ev) => {
      if (ev.key === "Enter") void this.runHarvest();
    });
    el("harvest-results").addEventListener("click", (ev) => {
      const pick = (ev.target as Element).closest(".pick-candidate");
      if (!pick) return;
      const index = Number(pick.getAttribute("data-index"));
      const candidate = this.harvested[index];
      if (!candidate) return;
      this.candidate = candidate;
      this.form = candidateToForm(candidate);
      this.formErrors = {};
      this.formServerError = null;
      this.renderAnnotate();
      el("annotate-host").scrollIntoView({ behavior: "smooth" });
    });
  }

  private async runHarvest(): Promise<void> {
    const query = el<HTMLInputElement>("harvest-query").value;
    const provider = el<HTMLSelectElement>("harvest-provider").value;
    try {
      const result = await this.api.harvest(query, provider);
      this.harvested = result.candidates;
      el("harvest-results").innerHTML = renderCandidateList(result);
      this.setOffline(false);
    } catch (err) {
      this.reportApiError(err);
    }
  }

  private bindAnnotate(): void {
    const host = el("annotate-host");
    host.addEventListener("submit", (ev) => {
      ev.preventDefault();
      void this.submitDraft();
    });
    host.addEventListener("input", (ev) => {
      const target = ev.target as HTMLInputElement | HTMLTextAreaElement;
      this.captureForm();
      if (target.name) delete this.formErrors[target.name];
    });
    host.addEventListener("click", (ev) => {
      const target = ev.target as HTMLElement;
      if (target.classList.contains("add-var")) {
        this.captureForm();
        const kind = target.getAttribute("data-kind") as "inputs" | "outputs";
        this.form[kind].push({ name: "", dtype: "int" });
        this.renderAnnotate();
      } else if (target.classList.contains("remove-var")) {
        this.captureForm();
        const row = target.closest(".var-row")!;
        const kind = row.getAttribute("data-kind") as "inputs" | "outputs";
        const index = Number(row.getAttribute("data-index"));
        this.form[kind].splice(index, 1);
        this.renderAnnotate();
      }
    });
  }

  private captureForm(): void {
    const host = el("annotate-host");
    const read = (name: string) =>
      host.querySelector<HTMLInputElement>(`[name="${name}"]`)?.value ?? "";
    const rows = (kind: "inputs" | "outputs") =>
      Array.from(
        host.querySelectorAll(`.var-row[data-kind="${kind}"]`),
      ).map((row) => ({
        name: row.querySelector<HTMLInputElement>(".var-name")?.value ?? "",
        dtype: row.querySelector<HTMLSelectElement>(".var-dtype")?.value ?? "int",
      }));
    this.form = {
      id: read("id"),
      name: read("name"),
      description: read("description"),
      keywords: read("keywords"),
      inputs: rows("inputs"),
      outputs: rows("outputs"),
      snippet:
        host.querySelector<HTMLTextAreaElement>(`[name="snippet"]`)?.value ?? "",
    };
  }

  private async submitDraft(): Promise<void> {
    this.captureForm();
    this.formErrors = validateDraft(this.form);
    this.formServerError = null;
    if (Object.keys(this.formErrors).length > 0) {
      this.renderAnnotate();
      return;
    }
    const payload = draftPayload(this.form);
    try {
      const added = this.candidate
        ? await this.api.importCandidate(this.candidate, payload)
        : await this.api.addConcept(payload);
      this.flash(`added concept '${added.added}'`);
      this.candidate = null;
      this.form = emptyForm();
      this.renderAnnotate();
      await this.refreshPalette();
    } catch (err) {
      if (err instanceof ServiceError) {
        this.formServerError = err.payload;
        this.renderAnnotate();
        const caret = caretPosition(err.payload);
        if (caret) {
          const area = el("annotate-host").querySelector<HTMLTextAreaElement>(
            `[name="snippet"]`,
          )!;
          const offset = caretOffset(area.value, caret);
          area.focus();
          area.setSelectionRange(offset, offset);
        }
      } else {
        this.reportApiError(err);
      }
    }
  }

  private reportApiError(err: unknown): void {
    if (err instanceof OfflineError) {
      this.setOffline(true);
    } else if (err instanceof ServiceError) {
      this.flash(`${err.payload.code}: ${err.payload.message}`);
    } else {
      throw err;
    }
  }

  private freshNodeId(): string {
    let id = `n${this.nextNodeNumber}`;
    while (this.editor.node(id)) {
      this.nextNodeNumber += 1;
      id = `n${this.nextNodeNumber}`;
    }
    this.nextNodeNumber += 1;
    return id;
  }
}

const app = new App();
void app.start();
