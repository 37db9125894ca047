/**
 * Scene -> PNG (the raster output), with no native canvas dependency.
 *
 * Geometry is rasterized directly (Bresenham lines, scanline polygon fill)
 * into an RGB buffer and encoded as a PNG via node's zlib. Text uses a
 * built-in 5x7 bitmap font covering lowercase letters, digits and the few
 * symbols the figures need; other characters are lowercased or skipped.
 */

import * as zlib from "node:zlib";

import { Cmd, Scene } from "./scene";

// ---------------------------------------------------------------- font

const GLYPHS: Record<string, string[]> = {
  a: [".....", ".....", ".###.", "....#", ".####", "#...#", ".####"],
  b: ["#....", "#....", "####.", "#...#", "#...#", "#...#", "####."],
  c: [".....", ".....", ".####", "#....", "#....", "#....", ".####"],
  d: ["....#", "....#", ".####", "#...#", "#...#", "#...#", ".####"],
  e: [".....", ".....", ".###.", "#...#", "#####", "#....", ".###."],
  f: ["..##.", ".#...", "####.", ".#...", ".#...", ".#...", ".#..."],
  g: [".....", ".####", "#...#", "#...#", ".####", "....#", ".###."],
  h: ["#....", "#....", "####.", "#...#", "#...#", "#...#", "#...#"],
  i: ["..#..", ".....", ".##..", "..#..", "..#..", "..#..", ".###."],
  j: ["...#.", ".....", "..##.", "...#.", "...#.", "#..#.", ".##.."],
  k: ["#....", "#....", "#..#.", "#.#..", "##...", "#.#..", "#..#."],
  l: [".##..", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."],
  m: [".....", ".....", "##.#.", "#.#.#", "#.#.#", "#.#.#", "#.#.#"],
  n: [".....", ".....", "####.", "#...#", "#...#", "#...#", "#...#"],
  o: [".....", ".....", ".###.", "#...#", "#...#", "#...#", ".###."],
  p: [".....", ".....", "####.", "#...#", "####.", "#....", "#...."],
  q: [".....", ".....", ".####", "#...#", ".####", "....#", "....#"],
  r: [".....", ".....", "#.##.", "##...", "#....", "#....", "#...."],
  s: [".....", ".....", ".####", "#....", ".###.", "....#", "####."],
  t: [".#...", ".#...", "####.", ".#...", ".#...", ".#...", "..##."],
  u: [".....", ".....", "#...#", "#...#", "#...#", "#...#", ".####"],
  v: [".....", ".....", "#...#", "#...#", "#...#", ".#.#.", "..#.."],
  w: [".....", ".....", "#.#.#", "#.#.#", "#.#.#", "#.#.#", ".#.#."],
  x: [".....", ".....", "#...#", ".#.#.", "..#..", ".#.#.", "#...#"],
  y: [".....", ".....", "#...#", "#...#", ".####", "....#", ".###."],
  z: [".....", ".....", "#####", "...#.", "..#..", ".#...", "#####"],
  "0": [".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."],
  "1": ["..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."],
  "2": [".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"],
  "3": [".###.", "#...#", "....#", "..##.", "....#", "#...#", ".###."],
  "4": ["...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."],
  "5": ["#####", "#....", "####.", "....#", "....#", "#...#", ".###."],
  "6": ["..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."],
  "7": ["#####", "....#", "...#.", "..#..", "..#..", ".#...", ".#..."],
  "8": [".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."],
  "9": [".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."],
  ".": [".....", ".....", ".....", ".....", ".....", ".##..", ".##.."],
  "-": [".....", ".....", ".....", ".####", ".....", ".....", "....."],
  "(": ["...#.", "..#..", ".#...", ".#...", ".#...", "..#..", "...#."],
  ")": [".#...", "..#..", "...#.", "...#.", "...#.", "..#..", ".#..."],
  ",": [".....", ".....", ".....", ".....", ".##..", "..#..", ".#..."],
  "=": [".....", ".....", "####.", ".....", "####.", ".....", "....."],
  "%": ["##..#", "##..#", "...#.", "..#..", ".#...", "#..##", "#..##"],
  "+": [".....", "..#..", "..#..", "#####", "..#..", "..#..", "....."],
  " ": [".....", ".....", ".....", ".....", ".....", ".....", "....."],
};

const GLYPH_W = 6; // 5 pixels + 1 spacing
const GLYPH_H = 7;

// ------------------------------------------------------------- canvas

class Raster {
  data: Uint8Array;

  constructor(public width: number, public height: number) {
    this.data = new Uint8Array(width * height * 3).fill(255);
  }

  set(x: number, y: number, rgb: [number, number, number]): void {
    x = Math.round(x);
    y = Math.round(y);
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = (y * this.width + x) * 3;
    this.data[i] = rgb[0];
    this.data[i + 1] = rgb[1];
    this.data[i + 2] = rgb[2];
  }

  disc(cx: number, cy: number, r: number, rgb: [number, number, number]): void {
    const rr = Math.max(r, 0.5);
    for (let y = Math.floor(cy - rr); y <= Math.ceil(cy + rr); y++) {
      const dy = y - cy;
      const half = rr * rr - dy * dy;
      if (half < 0) continue;
      const dx = Math.sqrt(half);
      for (let x = Math.round(cx - dx); x <= Math.round(cx + dx); x++) {
        this.set(x, y, rgb);
      }
    }
  }

  line(x1: number, y1: number, x2: number, y2: number, rgb: [number, number, number], width = 1): void {
    let x = Math.round(x1);
    let y = Math.round(y1);
    const ex = Math.round(x2);
    const ey = Math.round(y2);
    const dx = Math.abs(ex - x);
    const dy = -Math.abs(ey - y);
    const sx = x < ex ? 1 : -1;
    const sy = y < ey ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      if (width > 1) this.disc(x, y, width / 2, rgb);
      else this.set(x, y, rgb);
      if (x === ex && y === ey) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y += sy;
      }
    }
  }

  fillRect(x: number, y: number, w: number, h: number, rgb: [number, number, number]): void {
    for (let yy = Math.round(y); yy < Math.round(y + h); yy++) {
      for (let xx = Math.round(x); xx < Math.round(x + w); xx++) {
        this.set(xx, yy, rgb);
      }
    }
  }

  fillPolygon(points: [number, number][], rgb: [number, number, number]): void {
    if (points.length < 3) return;
    const ys = points.map((p) => p[1]);
    const yMin = Math.max(0, Math.floor(Math.min(...ys)));
    const yMax = Math.min(this.height - 1, Math.ceil(Math.max(...ys)));
    for (let y = yMin; y <= yMax; y++) {
      const xs: number[] = [];
      for (let i = 0; i < points.length; i++) {
        const [x1, y1] = points[i];
        const [x2, y2] = points[(i + 1) % points.length];
        if (y1 === y2) continue;
        const [lo, hi] = y1 < y2 ? [y1, y2] : [y2, y1];
        if (y + 0.5 < lo || y + 0.5 >= hi) continue;
        xs.push(x1 + ((y + 0.5 - y1) / (y2 - y1)) * (x2 - x1));
      }
      xs.sort((a, b) => a - b);
      for (let i = 0; i + 1 < xs.length; i += 2) {
        for (let x = Math.round(xs[i]); x <= Math.round(xs[i + 1]); x++) {
          this.set(x, y, rgb);
        }
      }
    }
  }

  text(
    x: number,
    y: number,
    text: string,
    rgb: [number, number, number],
    size = 11,
    anchor: "start" | "middle" | "end" = "start"
  ): void {
    const scale = size >= 14 ? 2 : 1;
    const chars = [...text.toLowerCase()].filter((c) => GLYPHS[c]);
    const width = chars.length * GLYPH_W * scale;
    let px = anchor === "middle" ? x - width / 2 : anchor === "end" ? x - width : x;
    const top = y - GLYPH_H * scale; // y is the text baseline
    for (const c of chars) {
      const glyph = GLYPHS[c];
      for (let gy = 0; gy < GLYPH_H; gy++) {
        for (let gx = 0; gx < 5; gx++) {
          if (glyph[gy][gx] === "#") {
            this.fillRect(px + gx * scale, top + gy * scale, scale, scale, rgb);
          }
        }
      }
      px += GLYPH_W * scale;
    }
  }
}

function parseHex(color: string | undefined, fallback: [number, number, number] = [0, 0, 0]): [number, number, number] {
  if (!color || !color.startsWith("#")) return fallback;
  const n = parseInt(color.slice(1), 16);
  return [(n >> 16) & 0xff, (n >> 8) & 0xff, n & 0xff];
}

function drawCmd(img: Raster, cmd: Cmd): void {
  switch (cmd.kind) {
    case "rect": {
      if (cmd.fill && cmd.fill !== "none") {
        img.fillRect(cmd.x, cmd.y, cmd.w, cmd.h, parseHex(cmd.fill, [255, 255, 255]));
      }
      if (cmd.stroke) {
        const rgb = parseHex(cmd.stroke);
        img.line(cmd.x, cmd.y, cmd.x + cmd.w, cmd.y, rgb);
        img.line(cmd.x, cmd.y + cmd.h, cmd.x + cmd.w, cmd.y + cmd.h, rgb);
        img.line(cmd.x, cmd.y, cmd.x, cmd.y + cmd.h, rgb);
        img.line(cmd.x + cmd.w, cmd.y, cmd.x + cmd.w, cmd.y + cmd.h, rgb);
      }
      break;
    }
    case "line":
      img.line(cmd.x1, cmd.y1, cmd.x2, cmd.y2, parseHex(cmd.stroke), cmd.width ?? 1);
      break;
    case "polyline": {
      const rgb = parseHex(cmd.stroke);
      for (let i = 0; i + 1 < cmd.points.length; i++) {
        const [x1, y1] = cmd.points[i];
        const [x2, y2] = cmd.points[i + 1];
        if ([x1, y1, x2, y2].every(Number.isFinite)) {
          img.line(x1, y1, x2, y2, rgb, cmd.width ?? 1);
        }
      }
      break;
    }
    case "polygon":
      img.fillPolygon(cmd.points.filter((p) => p.every(Number.isFinite)), parseHex(cmd.fill));
      break;
    case "circle":
      img.disc(cmd.cx, cmd.cy, cmd.r, parseHex(cmd.fill));
      break;
    case "text":
      img.text(cmd.x, cmd.y, cmd.text, parseHex(cmd.fill), cmd.size ?? 11, cmd.anchor ?? "start");
      break;
  }
}

// ------------------------------------------------------------ PNG out

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(data: Uint8Array): number {
  let crc = 0xffffffff;
  for (const byte of data) {
    crc = CRC_TABLE[(crc ^ byte) & 0xff] ^ (crc >>> 8);
  }
  return (crc ^ 0xffffffff) >>> 0;
}

function chunk(type: string, payload: Uint8Array): Buffer {
  const head = Buffer.alloc(8);
  head.writeUInt32BE(payload.length, 0);
  head.write(type, 4, "ascii");
  const body = Buffer.concat([Buffer.from(type, "ascii"), Buffer.from(payload)]);
  const tail = Buffer.alloc(4);
  tail.writeUInt32BE(crc32(body), 0);
  return Buffer.concat([head, Buffer.from(payload), tail]);
}

export function encodePng(img: Raster): Buffer {
  const { width, height, data } = img;
  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(width, 0);
  ihdr.writeUInt32BE(height, 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 2; // truecolor RGB
  const raw = Buffer.alloc(height * (1 + width * 3));
  for (let y = 0; y < height; y++) {
    const offset = y * (1 + width * 3);
    raw[offset] = 0; // filter: none
    raw.set(data.subarray(y * width * 3, (y + 1) * width * 3), offset + 1);
  }
  return Buffer.concat([
    Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
    chunk("IHDR", ihdr),
    chunk("IDAT", zlib.deflateSync(raw, { level: 9 })),
    chunk("IEND", new Uint8Array(0)),
  ]);
}

export function renderPng(scene: Scene): Buffer {
  const img = new Raster(scene.width, scene.height);
  for (const cmd of scene.cmds) {
    drawCmd(img, cmd);
  }
  return encodePng(img);
}
