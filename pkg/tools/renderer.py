"""
Renderer tool: rasters and tasks as ANSI text or binary PPM (P6) images.

ANSI output draws each pixel as two spaces on a 24-bit background color, one
raster row per line, so it can be parsed back into rasters. PPM output tiles
a task's pairs left to right with each input above its output.
"""

import re
from typing import List, Optional, Union

import numpy as np

from models.grid import Color, Raster
from models.task import Task

PALETTE = np.array([
    (0x00, 0x00, 0x00),  # Black
    (0x00, 0x74, 0xD9),  # Blue
    (0xFF, 0x41, 0x36),  # Red
    (0x2E, 0xCC, 0x40),  # Green
    (0xFF, 0xDC, 0x00),  # Yellow
    (0xAA, 0xAA, 0xAA),  # Grey
    (0xF0, 0x12, 0xBE),  # Fuchsia
    (0xFF, 0x85, 0x1B),  # Orange
    (0x7F, 0xDB, 0xFF),  # Teal
    (0x87, 0x0C, 0x25),  # Brown
], dtype=np.uint8)

# gutter between tiles; not a palette color
GUTTER = (0x40, 0x40, 0x40)
RESET = "\x1b[0m"
_CELL = re.compile(r"\x1b\[48;2;(\d+);(\d+);(\d+)m  ")
_BY_RGB = {tuple(int(v) for v in rgb): Color(i) for i, rgb in enumerate(PALETTE)}

Renderable = Union[Raster, Task]


class Renderer:
    """Tool for drawing rasters and tasks."""

    def __init__(self, gap: int = 1):
        self.gap = gap

    # ANSI

    def ansi_raster(self, raster: Raster) -> str:
        lines = []
        for row in raster.to_grid():
            cells = "".join("\x1b[48;2;{};{};{}m  ".format(*PALETTE[c]) for c in row)
            lines.append(cells + RESET)
        return "\n".join(lines)

    def ansi_task(self, task: Task) -> str:
        blocks = [f"task {task.label}"]
        for kind, examples in (("demo", task.demonstrations), ("test", task.tests)):
            for i, example in enumerate(examples, start=1):
                blocks.append(f"{kind} {i} input")
                blocks.append(self.ansi_raster(example.input))
                if example.output is not None:
                    blocks.append(f"{kind} {i} output")
                    blocks.append(self.ansi_raster(example.output))
        return "\n".join(blocks)

    def parse_ansi(self, text: str) -> List[Raster]:
        """
        Read back every raster drawn by ``ansi_raster``/``ansi_task``.

        Consecutive cell lines form one raster; any other line separates rasters.
        """
        rasters: List[Raster] = []
        rows: List[List[int]] = []
        for line in text.split("\n"):
            cells = _CELL.findall(line)
            if cells:
                rows.append([int(_BY_RGB[(int(r), int(g), int(b))]) for r, g, b in cells])
                continue
            if rows:
                rasters.append(Raster.from_grid(rows))
                rows = []
        if rows:
            rasters.append(Raster.from_grid(rows))
        return rasters

    # PPM

    def rgb(self, raster: Raster) -> np.ndarray:
        return PALETTE[raster.to_array()]

    def tile_task(self, task: Task) -> np.ndarray:
        """One RGB canvas: a column per pair, input above output."""
        pairs = list(task.demonstrations) + list(task.tests)
        top = max(p.input.height for p in pairs)
        bottom = max((p.output.height for p in pairs if p.output is not None), default=0)
        widths = [max(p.input.width, p.output.width if p.output is not None else 0) for p in pairs]
        height = top + (self.gap + bottom if bottom else 0)
        width = sum(widths) + self.gap * (len(pairs) - 1)
        canvas = np.empty((height, width, 3), dtype=np.uint8)
        canvas[:] = GUTTER
        x = 0
        for pair, w in zip(pairs, widths):
            canvas[:pair.input.height, x:x + pair.input.width] = self.rgb(pair.input)
            if pair.output is not None:
                y = top + self.gap
                canvas[y:y + pair.output.height, x:x + pair.output.width] = self.rgb(pair.output)
            x += w + self.gap
        return canvas

    def ppm(self, image: np.ndarray) -> bytes:
        h, w, _ = image.shape
        return f"P6\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(image, dtype=np.uint8).tobytes()

    def ppm_raster(self, raster: Raster) -> bytes:
        return self.ppm(self.rgb(raster))

    def ppm_task(self, task: Task) -> bytes:
        return self.ppm(self.tile_task(task))

    def render(self, obj: Renderable, fmt: str = "ansi") -> bytes:
        """
        Render a raster or task.

        Args:
            obj: what to draw
            fmt: ``ansi`` or ``ppm``

        Returns:
            UTF-8 text for ``ansi`` (with a trailing newline), image bytes for ``ppm``
        """
        if fmt == "ppm":
            return self.ppm_task(obj) if isinstance(obj, Task) else self.ppm_raster(obj)
        if fmt == "ansi":
            text = self.ansi_task(obj) if isinstance(obj, Task) else self.ansi_raster(obj)
            return (text + "\n").encode("utf-8")
        raise ValueError(f"unknown render format: {fmt}")


def parse_ppm(data: bytes) -> np.ndarray:
    """Decode a P6 image written by ``Renderer.ppm`` into an (H, W, 3) array."""
    header, _, rest = data.partition(b"\n255\n")
    magic, size = header.split(b"\n", 1)
    if magic != b"P6":
        raise ValueError("not a P6 image")
    w, h = (int(v) for v in size.split())
    return np.frombuffer(rest, dtype=np.uint8).reshape(h, w, 3)


def raster_from_rgb(image: np.ndarray) -> Optional[Raster]:
    """Map a palette-only RGB array back to a raster; None if it holds other colors."""
    rows = []
    for line in image:
        row = []
        for rgb in line:
            color = _BY_RGB.get(tuple(int(v) for v in rgb))
            if color is None:
                return None
            row.append(int(color))
        rows.append(row)
    return Raster.from_grid(rows)
