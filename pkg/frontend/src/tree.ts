/** Tree view-model: the decomposition hierarchy plus badges, derived once
 * from the model JSON (structure never changes during a session). */

import type { ModelJson } from "./api.js";

export interface TreeNode {
  id: string;
  kindLabel: string; // "root" | "mandatory" | "optional" | "member of g [a..b]"
  cardinalityBadge: string | null; // on the member, e.g. "[1..2]"
  constraintBadges: string[]; // e.g. "mutex E", "requires C"
  attributes: Record<string, string>;
  children: TreeNode[];
}

export function buildTree(model: ModelJson): TreeNode {
  const childrenOf = new Map<string, { id: string; kindLabel: string; badge: string | null }[]>();

  const push = (parent: string, entry: { id: string; kindLabel: string; badge: string | null }) => {
    const siblings = childrenOf.get(parent) ?? [];
    siblings.push(entry);
    childrenOf.set(parent, siblings);
  };

  for (const edge of model.edges) {
    push(edge.parent, { id: edge.child, kindLabel: edge.kind, badge: null });
  }
  for (const group of model.groups) {
    const badge = `[${group.min}..${group.max}]`;
    for (const member of group.members) {
      push(group.parent, { id: member, kindLabel: `member of ${group.id}`, badge });
    }
  }

  const badges = new Map<string, string[]>();
  const addBadge = (feature: string, text: string) => {
    const list = badges.get(feature) ?? [];
    list.push(text);
    badges.set(feature, list);
  };
  for (const constraint of model.constraints) {
    if (constraint.kind === "mutex") {
      addBadge(constraint.a, `mutex ${constraint.b}`);
      addBadge(constraint.b, `mutex ${constraint.a}`);
    } else {
      addBadge(constraint.a, `requires ${constraint.b}`);
    }
  }

  const attributesOf = (feature: string): Record<string, string> => {
    const out: Record<string, string> = {};
    for (const [name, values] of Object.entries(model.attrs)) {
      if (feature in values) {
        out[name] = values[feature];
      }
    }
    return out;
  };

  const build = (id: string, kindLabel: string, badge: string | null): TreeNode => ({
    id,
    kindLabel,
    cardinalityBadge: badge,
    constraintBadges: badges.get(id) ?? [],
    attributes: attributesOf(id),
    children: (childrenOf.get(id) ?? []).map((c) => build(c.id, c.kindLabel, c.badge)),
  });

  return build(model.root, "root", null);
}

export function countNodes(node: TreeNode): number {
  return 1 + node.children.reduce((total, child) => total + countNodes(child), 0);
}
