// Scatter history model: rows follow the served class order, columns the
// visible frames (newest rightmost). Zero-count cells draw no mark. Marks
// get a minimum on-screen size and whole row bands act as hover targets,
// because tiny marks are miserable to point at; the selected row is backed
// yellow and its marks outlined.

import { countToHex, HIGHLIGHT_HEX } from "./color.js";
import type { ColorScale, FrameMsg } from "./records.js";

export interface Mark {
  classId: string;
  windowIndex: number;
  count: number;
  row: number;
  col: number;
  x: number;
  y: number;
  size: number;
  color: string;
  highlighted: boolean;
}

export interface RowBand {
  classId: string;
  y: number;
  height: number;
  highlighted: boolean;
}

export const MIN_MARK_PX = 6;

export class ScatterModel {
  constructor(
    public width: number,
    public height: number,
  ) {}

  private rowHeight(rows: number): number {
    return rows ? this.height / rows : 0;
  }

  private colWidth(cols: number): number {
    return cols ? this.width / cols : 0;
  }

  rowBands(order: string[], selected: string | null): RowBand[] {
    const h = this.rowHeight(order.length);
    return order.map((classId, row) => ({
      classId,
      y: row * h,
      height: h,
      highlighted: classId === selected,
    }));
  }

  marks(
    order: string[],
    frames: FrameMsg[],
    selected: string | null,
    colorRef: number,
    colorScale: ColorScale,
  ): Mark[] {
    const rowH = this.rowHeight(order.length);
    const colW = this.colWidth(frames.length);
    const size = Math.max(MIN_MARK_PX, Math.min(rowH, colW) * 0.8);
    const out: Mark[] = [];
    order.forEach((classId, row) => {
      frames.forEach((frame, col) => {
        const count = frame.counts[classId] ?? 0;
        if (count <= 0) return; // no mark for idle cells
        out.push({
          classId,
          windowIndex: frame.windowIndex,
          count,
          row,
          col,
          x: col * colW + colW / 2,
          y: row * rowH + rowH / 2,
          size,
          color: countToHex(count, colorRef, colorScale),
          highlighted: classId === selected,
        });
      });
    });
    return out;
  }

  highlightedClassIds(marks: Mark[], bands: RowBand[]): Set<string> {
    const out = new Set<string>();
    for (const mark of marks) if (mark.highlighted) out.add(mark.classId);
    for (const band of bands) if (band.highlighted) out.add(band.classId);
    return out;
  }

  /** Row-band hit test: any y inside a row hovers that class. */
  classAt(y: number, order: string[]): string | null {
    if (!order.length || y < 0 || y >= this.height) return null;
    const row = Math.floor(y / this.rowHeight(order.length));
    return order[row] ?? null;
  }

  /** Column hit test, for seek-by-click on the time axis. */
  windowAt(x: number, frames: FrameMsg[]): number | null {
    if (!frames.length || x < 0 || x >= this.width) return null;
    const col = Math.floor(x / this.colWidth(frames.length));
    return frames[col]?.windowIndex ?? null;
  }

  paint(
    ctx: CanvasRenderingContext2D,
    order: string[],
    frames: FrameMsg[],
    selected: string | null,
    colorRef: number,
    colorScale: ColorScale,
  ): void {
    ctx.clearRect(0, 0, this.width, this.height);
    for (const band of this.rowBands(order, selected)) {
      if (band.highlighted) {
        ctx.fillStyle = HIGHLIGHT_HEX;
        ctx.globalAlpha = 0.35;
        ctx.fillRect(0, band.y, this.width, band.height);
        ctx.globalAlpha = 1;
      }
    }
    for (const mark of this.marks(order, frames, selected, colorRef, colorScale)) {
      ctx.fillStyle = mark.color;
      ctx.fillRect(mark.x - mark.size / 2, mark.y - mark.size / 2, mark.size, mark.size);
      if (mark.highlighted) {
        ctx.strokeStyle = HIGHLIGHT_HEX;
        ctx.lineWidth = 2;
        ctx.strokeRect(mark.x - mark.size / 2, mark.y - mark.size / 2, mark.size, mark.size);
      }
    }
  }
}
