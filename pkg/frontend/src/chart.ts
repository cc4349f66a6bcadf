/** Divergent bar chart of the per-question Likert counts.
 *
 * One SVG row per question: the two "much more / more" segments of the
 * first scorer extend left of the midline, the second scorer's to the
 * right, and the neutral share straddles the center.
 */

import type { ExportPayload, QuestionAggregate } from "./api.js";

export interface Segment {
  bucket: string;
  count: number;
  /** horizontal span in [0, 1] viewport coordinates */
  x0: number;
  x1: number;
}

/** Compute the centered layout for one question row. */
export function divergentSegments(question: QuestionAggregate, scorers: string[]): Segment[] {
  const [first, second] = scorers;
  const order = [
    `much_more_${first}`,
    `more_${first}`,
    "equal",
    `more_${second}`,
    `much_more_${second}`,
  ];
  const counts = order.map((bucket) => question.counts[bucket] ?? 0);
  const total = counts.reduce((a, b) => a + b, 0);
  if (total === 0) {
    return order.map((bucket) => ({ bucket, count: 0, x0: 0.5, x1: 0.5 }));
  }
  const widths = counts.map((c) => c / total);
  // left edge so that half of "equal" sits left of the 0.5 midline
  const w0 = widths[0] ?? 0;
  const w1 = widths[1] ?? 0;
  const equalWidth = widths[2] ?? 0;
  let cursor = 0.5 - (w0 + w1 + equalWidth / 2);
  const segments: Segment[] = [];
  order.forEach((bucket, index) => {
    const width = widths[index] ?? 0;
    segments.push({ bucket, count: counts[index] ?? 0, x0: cursor, x1: cursor + width });
    cursor += width;
  });
  return segments;
}

const SVG_NS = "http://www.w3.org/2000/svg";
const ROW_HEIGHT = 34;
const WIDTH = 640;
const LABEL_WIDTH = 140;

export function renderDivergentBars(payload: ExportPayload): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  const height = payload.aggregation.length * ROW_HEIGHT + 20;
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${height}`);
  svg.setAttribute("width", String(WIDTH));
  svg.setAttribute("height", String(height));
  svg.setAttribute("role", "img");
  svg.setAttribute("aria-label", "Likert response distribution per question");

  const barWidth = WIDTH - LABEL_WIDTH - 10;
  const colors = ["#2c5fad", "#7aa3e0", "#cccccc", "#e8a27b", "#c95f2b"];
  payload.aggregation.forEach((question, row) => {
    const y = 10 + row * ROW_HEIGHT;
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", "0");
    label.setAttribute("y", String(y + 16));
    label.setAttribute("class", "chart-label");
    label.textContent = question.goal;
    svg.appendChild(label);

    divergentSegments(question, payload.scorers).forEach((segment, index) => {
      if (segment.x1 <= segment.x0) return;
      const rect = document.createElementNS(SVG_NS, "rect");
      rect.setAttribute("x", String(LABEL_WIDTH + segment.x0 * barWidth));
      rect.setAttribute("y", String(y));
      rect.setAttribute("width", String((segment.x1 - segment.x0) * barWidth));
      rect.setAttribute("height", "22");
      rect.setAttribute("fill", colors[index] ?? "#999999");
      rect.setAttribute("data-bucket", segment.bucket);
      rect.setAttribute("data-count", String(segment.count));
      const title = document.createElementNS(SVG_NS, "title");
      title.textContent = `${segment.bucket}: ${segment.count}`;
      rect.appendChild(title);
      svg.appendChild(rect);
    });
  });

  const midline = document.createElementNS(SVG_NS, "line");
  midline.setAttribute("x1", String(LABEL_WIDTH + 0.5 * barWidth));
  midline.setAttribute("x2", String(LABEL_WIDTH + 0.5 * barWidth));
  midline.setAttribute("y1", "0");
  midline.setAttribute("y2", String(height));
  midline.setAttribute("stroke", "#444444");
  midline.setAttribute("stroke-dasharray", "4 3");
  svg.appendChild(midline);
  return svg;
}
