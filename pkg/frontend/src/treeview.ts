/** View models for rendering AST JSON: a flattened collapsible outline and
 * a boxes-and-edges layout for the SVG toggle. */

import { AstJson } from "./api.js";

export interface TreeRow {
  key: string;       // stable path id, e.g. "0.1"
  depth: number;
  name: string;
  lexeme?: string;
  hasChildren: boolean;
  collapsed: boolean;
}

export function leafCount(ast: AstJson): number {
  if (!ast.children || ast.children.length === 0) {
    return ast.lexeme !== undefined ? 1 : 0;
  }
  return ast.children.reduce((n, c) => n + leafCount(c), 0);
}

export function nodeCount(ast: AstJson): number {
  return 1 + (ast.children ?? []).reduce((n, c) => n + nodeCount(c), 0);
}

/** Preorder rows for the indented outline; children of collapsed rows are
 * omitted but the rows themselves stay visible. */
export function flattenAst(ast: AstJson, collapsed: Set<string>): TreeRow[] {
  const rows: TreeRow[] = [];
  const walk = (node: AstJson, key: string, depth: number) => {
    const children = node.children ?? [];
    const isCollapsed = collapsed.has(key);
    rows.push({
      key,
      depth,
      name: node.name,
      lexeme: node.lexeme,
      hasChildren: children.length > 0,
      collapsed: isCollapsed,
    });
    if (!isCollapsed) {
      children.forEach((c, i) => walk(c, `${key}.${i}`, depth + 1));
    }
  };
  walk(ast, "0", 0);
  return rows;
}

export interface TreeBox {
  x: number;
  y: number;
  width: number;
  height: number;
  label: string;
  lexeme?: string;
}

export interface TreeEdge {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface TreeLayout {
  boxes: TreeBox[];
  edges: TreeEdge[];
  width: number;
  height: number;
}

const BOX_W = 72;
const BOX_H = 30;
const GAP_X = 10;
const GAP_Y = 22;

/** Classic tidy-ish layout: leaves evenly spaced, parents centered above
 * their children. */
export function layoutAst(ast: AstJson): TreeLayout {
  const boxes: TreeBox[] = [];
  const edges: TreeEdge[] = [];
  let nextLeaf = 0;
  let maxDepth = 0;

  const place = (node: AstJson, depth: number): number => {
    maxDepth = Math.max(maxDepth, depth);
    const children = node.children ?? [];
    let centre: number;
    if (children.length === 0) {
      centre = nextLeaf * (BOX_W + GAP_X) + BOX_W / 2;
      nextLeaf += 1;
    } else {
      const centres = children.map((c) => place(c, depth + 1));
      centre = (centres[0] + centres[centres.length - 1]) / 2;
      for (const childCentre of centres) {
        edges.push({
          x1: centre,
          y1: depth * (BOX_H + GAP_Y) + BOX_H,
          x2: childCentre,
          y2: (depth + 1) * (BOX_H + GAP_Y),
        });
      }
    }
    boxes.push({
      x: centre - BOX_W / 2,
      y: depth * (BOX_H + GAP_Y),
      width: BOX_W,
      height: BOX_H,
      label: node.name,
      lexeme: node.lexeme,
    });
    return centre;
  };

  place(ast, 0);
  const width = Math.max(1, nextLeaf) * (BOX_W + GAP_X);
  const height = (maxDepth + 1) * (BOX_H + GAP_Y);
  return { boxes, edges, width, height };
}
