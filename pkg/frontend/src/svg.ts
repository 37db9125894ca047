/** Scene -> SVG text (the vector output). */

import { Cmd, Scene } from "./scene";

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function num(x: number): string {
  return Number(x.toFixed(2)).toString();
}

function cmdToSvg(cmd: Cmd): string {
  switch (cmd.kind) {
    case "rect": {
      const stroke = cmd.stroke ? ` stroke="${cmd.stroke}"` : "";
      return `<rect x="${num(cmd.x)}" y="${num(cmd.y)}" width="${num(cmd.w)}" height="${num(cmd.h)}" fill="${cmd.fill ?? "none"}"${stroke}/>`;
    }
    case "line":
      return `<line x1="${num(cmd.x1)}" y1="${num(cmd.y1)}" x2="${num(cmd.x2)}" y2="${num(cmd.y2)}" stroke="${cmd.stroke}" stroke-width="${cmd.width ?? 1}"/>`;
    case "polyline": {
      const points = cmd.points.map(([x, y]) => `${num(x)},${num(y)}`).join(" ");
      return `<polyline points="${points}" fill="none" stroke="${cmd.stroke}" stroke-width="${cmd.width ?? 1}"/>`;
    }
    case "polygon": {
      const points = cmd.points.map(([x, y]) => `${num(x)},${num(y)}`).join(" ");
      return `<polygon points="${points}" fill="${cmd.fill}" stroke="none"/>`;
    }
    case "circle":
      return `<circle cx="${num(cmd.cx)}" cy="${num(cmd.cy)}" r="${num(cmd.r)}" fill="${cmd.fill}"/>`;
    case "text": {
      const anchor = cmd.anchor ?? "start";
      return `<text x="${num(cmd.x)}" y="${num(cmd.y)}" font-family="Helvetica, Arial, sans-serif" font-size="${cmd.size ?? 11}" text-anchor="${anchor}" fill="${cmd.fill ?? "#000000"}">${esc(cmd.text)}</text>`;
    }
  }
}

export function renderSvg(scene: Scene): string {
  const body = scene.cmds.map(cmdToSvg).join("\n  ");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" height="${scene.height}" ` +
    `viewBox="0 0 ${scene.width} ${scene.height}">\n  ${body}\n</svg>\n`
  );
}
