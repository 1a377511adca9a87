/** Browser wiring: implements the controller's View over plain DOM. */

import { ApiClient, RasterSummary, ZonalStats, ZoneSummary } from "./api.js";
import { CalibrationController, View } from "./controller.js";
import { NamedRow } from "./csv.js";
import { GRID_STEP } from "./state.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function startApp(baseUrl: string): CalibrationController {
  const errorBanner = el<HTMLDivElement>("error-banner");
  const errorText = el<HTMLSpanElement>("error-text");
  const retryButton = el<HTMLButtonElement>("retry");
  const zoneSelect = el<HTMLSelectElement>("zone-select");
  const rasterSelect = el<HTMLSelectElement>("raster-select");
  const thresholdValue = el<HTMLSpanElement>("threshold-value");
  const thresholdSlider = el<HTMLInputElement>("threshold-slider");
  const stepDown = el<HTMLButtonElement>("step-down");
  const stepUp = el<HTMLButtonElement>("step-up");
  const extendedToggle = el<HTMLInputElement>("extended-range");
  const opacitySlider = el<HTMLInputElement>("opacity");
  const previewImg = el<HTMLImageElement>("preview");
  const comparePreviewImg = el<HTMLImageElement>("compare-preview");
  const overlayImg = el<HTMLImageElement>("overlay");
  const statsPanel = el<HTMLDivElement>("stats");
  const referencePanel = el<HTMLSpanElement>("reference");
  const saveButton = el<HTMLButtonElement>("save");
  const saveError = el<HTMLSpanElement>("save-error");
  const tableBody = el<HTMLTableSectionElement>("threshold-rows");
  const exportButton = el<HTMLButtonElement>("export-csv");

  const view: View = {
    showError(message) {
      errorBanner.hidden = message === null;
      errorText.textContent = message ?? "";
    },
    showSaveError(message) {
      saveError.textContent = message ?? "";
    },
    renderZones(zones: ZoneSummary[]) {
      fillSelect(zoneSelect, zones.map((z) => [z.id, z.name]));
      zoneSelect.disabled = zones.length === 0;
      if (zones.length === 0) view.showError("store has no zones");
    },
    renderRasters(rasters: RasterSummary[]) {
      fillSelect(
        rasterSelect,
        rasters.map((r) => [r.id, `${r.id} (${r.sensor})`]),
      );
      rasterSelect.disabled = rasters.length === 0;
    },
    renderThreshold(value, range) {
      thresholdValue.textContent = value.toFixed(2);
      thresholdSlider.min = String(range[0]);
      thresholdSlider.max = String(range[1]);
      thresholdSlider.step = String(GRID_STEP);
      thresholdSlider.value = String(value);
    },
    renderStats(stats: ZonalStats | null) {
      if (!stats) {
        statsPanel.textContent = "pick a zone and a raster";
        return;
      }
      // Verbatim service numbers: no client-side rounding or math.
      statsPanel.innerHTML = [
        row("vegetation", `${stats.veg_pct} %`),
        row("vegetation area", `${stats.veg_area_km2} km²`),
        row("total area", `${stats.total_area_km2} km²`),
        row("nodata share", `${stats.nodata_pct} %`),
        row("pixels", `${stats.pixels_veg} of ${stats.pixels_total}`),
      ].join("");
    },
    renderReference(reference) {
      referencePanel.textContent = reference
        ? `reference for ${reference.name}: ${reference.value}`
        : "";
    },
    setPreview(url) {
      toggleImg(previewImg, url);
      toggleImg(comparePreviewImg, url);
    },
    setOverlay(url, opacity) {
      toggleImg(overlayImg, url);
      overlayImg.style.opacity = String(opacity);
    },
    renderTable(rows: NamedRow[]) {
      tableBody.innerHTML = rows
        .map(
          (r) =>
            `<tr><td>${escapeHtml(r.name)}</td>` +
            `<td>${r.modis ?? ""}</td><td>${r.sentinel2 ?? ""}</td></tr>`,
        )
        .join("");
    },
  };

  const controller = new CalibrationController(new ApiClient(baseUrl), view);

  retryButton.addEventListener("click", () => void controller.loadWorkspace());
  zoneSelect.addEventListener("change", () => void controller.selectZone(zoneSelect.value));
  rasterSelect.addEventListener("change", () =>
    void controller.selectRaster(rasterSelect.value),
  );
  stepDown.addEventListener("click", () => void controller.step(-1));
  stepUp.addEventListener("click", () => void controller.step(1));
  thresholdSlider.addEventListener("input", () =>
    void controller.setThreshold(Number(thresholdSlider.value)),
  );
  extendedToggle.addEventListener("change", () =>
    void controller.setExtendedRange(extendedToggle.checked),
  );
  opacitySlider.addEventListener("input", () =>
    controller.setOpacity(Number(opacitySlider.value)),
  );
  saveButton.addEventListener("click", () => void controller.save());
  exportButton.addEventListener("click", () => downloadCsv(controller.exportCsv()));

  void controller.loadWorkspace();
  return controller;
}

function fillSelect(select: HTMLSelectElement, entries: [string, string][]): void {
  select.innerHTML =
    `<option value="" disabled selected>choose…</option>` +
    entries
      .map(([value, label]) => `<option value="${value}">${escapeHtml(label)}</option>`)
      .join("");
}

function toggleImg(img: HTMLImageElement, url: string | null): void {
  if (url) {
    img.src = url;
    img.hidden = false;
  } else {
    img.removeAttribute("src");
    img.hidden = true;
  }
}

function row(label: string, value: string): string {
  return `<div class="stat"><span>${label}</span><strong>${value}</strong></div>`;
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function downloadCsv(text: string): void {
  const blob = new Blob([text], { type: "text/csv;charset=utf-8" });
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = "thresholds.csv";
  link.click();
  URL.revokeObjectURL(link.href);
}
