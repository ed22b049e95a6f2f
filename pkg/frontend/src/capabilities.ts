// Capability hints derived from the service's decision-table endpoint.
// The table is default-deny: a missing row means no.

import type {
  ActionName,
  DecisionRow,
  Relationship,
  ResourceClassName,
  RoleName,
} from "./types.js";

export class Capabilities {
  private allows = new Set<string>();

  constructor(rows: DecisionRow[]) {
    for (const row of rows) {
      if (row.allow) {
        this.allows.add(key(row.role, row.relationship, row.action, row.resource_class));
      }
    }
  }

  can(
    role: RoleName,
    relationship: Relationship,
    action: ActionName,
    resourceClass: ResourceClassName,
  ): boolean {
    return this.allows.has(key(role, relationship, action, resourceClass));
  }

  /** Bind the actor's role once; views then ask per relationship. */
  forRole(role: RoleName): BoundCapabilities {
    return new BoundCapabilities(this, role);
  }
}

export class BoundCapabilities {
  constructor(private table: Capabilities, readonly role: RoleName) {}

  can(action: ActionName, cls: ResourceClassName, relationship: Relationship): boolean {
    return this.table.can(this.role, relationship, action, cls);
  }
}

function key(role: string, rel: string, action: string, cls: string): string {
  return `${role}|${rel}|${action}|${cls}`;
}

/** data-action attribute value carried by every actionable control. */
export function actionTag(
  action: ActionName,
  cls: ResourceClassName,
  relationship: Relationship,
): string {
  return `${action}:${cls}:${relationship}`;
}

export function parseActionTag(
  value: string,
): { action: ActionName; cls: ResourceClassName; relationship: Relationship } {
  const [action, cls, relationship] = value.split(":");
  return {
    action: action as ActionName,
    cls: cls as ResourceClassName,
    relationship: relationship as Relationship,
  };
}
