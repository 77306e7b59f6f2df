// Heads-up label: the hovered class name lives in a fixed screen-space
// slot at the viewport's top-left, never in the 3D scene, so it cannot be
// occluded and never moves with the camera.

export interface ScreenSlot {
  left: number;
  top: number;
}

export const HEADS_UP_SLOT: ScreenSlot = { left: 12, top: 12 };

export class HeadsUpLabel {
  text: string | null = null;

  get slot(): ScreenSlot {
    return HEADS_UP_SLOT; // fixed; camera state has no influence
  }

  get visible(): boolean {
    return this.text !== null;
  }

  update(hoverName: string | null): void {
    this.text = hoverName;
  }
}
