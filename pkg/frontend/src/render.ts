/**
 * DOM wiring: board rendering, click handling with a visual reject cue,
 * the live readout table, and the export download.  All state lives in a
 * Session; this module only draws it.
 */

import { Cell, GridMap, MapParseError, key, parseMap } from "./map.js";
import { Session, serializeDemo } from "./session.js";
import { SpecEntry, SpecParseError, parseSpecs } from "./specs.js";

interface Elements {
  board: HTMLElement;
  status: HTMLElement;
  readout: HTMLElement;
  banner: HTMLElement;
  envId: HTMLInputElement;
  mapText: HTMLTextAreaElement;
  specText: HTMLTextAreaElement;
}

export class RecorderApp {
  private readonly el: Elements;
  private session: Session | null = null;
  private specs: SpecEntry[] = [];

  constructor(root: Document) {
    this.el = {
      board: root.getElementById("board")!,
      status: root.getElementById("status")!,
      readout: root.getElementById("readout")!,
      banner: root.getElementById("banner")!,
      envId: root.getElementById("env-id") as HTMLInputElement,
      mapText: root.getElementById("map-text") as HTMLTextAreaElement,
      specText: root.getElementById("spec-text") as HTMLTextAreaElement,
    };
    root.getElementById("load")!.addEventListener("click", () => this.load());
    root.getElementById("undo")!.addEventListener("click", () => {
      if (this.session?.undo()) {
        this.draw();
      }
    });
    root.getElementById("reset")!.addEventListener("click", () => {
      this.session?.reset();
      this.draw();
    });
    root.getElementById("export")!.addEventListener("click", () => this.export());
  }

  load(): void {
    this.el.banner.textContent = "";
    this.el.banner.classList.remove("visible");
    try {
      const map = parseMap(this.el.mapText.value);
      this.specs =
        this.el.specText.value.trim() === ""
          ? []
          : parseSpecs(this.el.specText.value, map);
      this.session = new Session(map, this.el.envId.value.trim() || "custom");
    } catch (err) {
      this.session = null;
      this.el.board.replaceChildren();
      this.el.readout.replaceChildren();
      const label =
        err instanceof MapParseError || err instanceof SpecParseError
          ? String((err as Error).message)
          : `unexpected error: ${err}`;
      this.el.banner.textContent = label;
      this.el.banner.classList.add("visible");
      this.el.status.textContent = "";
      return;
    }
    this.buildBoard(this.session.map);
    this.draw();
  }

  private buildBoard(map: GridMap): void {
    const board = this.el.board;
    board.replaceChildren();
    board.style.gridTemplateColumns = `repeat(${map.width}, var(--cell))`;
    for (let r = 0; r < map.height; r++) {
      for (let c = 0; c < map.width; c++) {
        const div = document.createElement("div");
        div.className = "cell";
        div.dataset.cell = key([r, c]);
        if (map.obstacles.has(key([r, c]))) {
          div.classList.add("obstacle");
        }
        const goalIndex = map.goals.findIndex((g) => key(g) === key([r, c]));
        if (goalIndex >= 0) {
          div.classList.add("goal");
          div.textContent =
            map.goals.length === 1 ? "G" : `G${goalIndex + 1}`;
        }
        if (key(map.start) === key([r, c])) {
          div.classList.add("start");
          div.textContent = "S";
        }
        div.addEventListener("click", () => this.clickCell([r, c], div));
        board.appendChild(div);
      }
    }
  }

  private clickCell(cell: Cell, div: HTMLElement): void {
    if (this.session === null) {
      return;
    }
    const result = this.session.click(cell);
    if (result.kind === "rejected") {
      div.classList.remove("rejected");
      void div.offsetWidth; // restart the animation
      div.classList.add("rejected");
      this.el.status.textContent = `rejected: ${result.reason}`;
      return;
    }
    this.draw();
  }

  private draw(): void {
    if (this.session === null) {
      return;
    }
    const onPath = new Set(this.session.trajectory.map(key));
    const head = key(this.session.head);
    for (const div of this.el.board.querySelectorAll<HTMLElement>(".cell")) {
      const k = div.dataset.cell!;
      div.classList.toggle("visited", onPath.has(k));
      div.classList.toggle("head", k === head);
    }
    this.el.status.textContent =
      `${this.session.steps} steps, at (${this.session.head[0]}, ` +
      `${this.session.head[1]})`;
    this.drawReadout();
  }

  private drawReadout(): void {
    const body = this.el.readout;
    body.replaceChildren();
    if (this.session === null || this.specs.length === 0) {
      return;
    }
    const values = this.session.readout(this.specs);
    for (const spec of this.specs) {
      const rho = values.get(spec.name) ?? null;
      const row = document.createElement("tr");
      const cls =
        rho === null ? "na" : rho > 0 ? "pos" : rho < 0 ? "neg" : "zero";
      const shown =
        rho === null
          ? "n/a"
          : `${rho >= 0 ? "+" : ""}${rho.toFixed(4)}`;
      row.innerHTML =
        `<td>${spec.name}</td><td>${spec.kind}</td>` +
        `<td class="rho ${cls}">${shown}</td>`;
      body.appendChild(row);
    }
  }

  private export(): void {
    if (this.session === null) {
      return;
    }
    const text = serializeDemo(this.session.exportDemo());
    const blob = new Blob([text], { type: "application/json" });
    const url = URL.createObjectURL(blob);
    const a = document.createElement("a");
    a.href = url;
    a.download = `demo_${this.session.envId}.json`;
    a.click();
    URL.revokeObjectURL(url);
  }
}
