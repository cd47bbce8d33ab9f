/**
 * Pluggable map pane. The default adapter draws a static SVG coordinate plot
 * from the centers' lat/lon (no network, works in offline test runs); a tile
 * adapter can be swapped in at build time via VITE_TILE_URL for deployments
 * with a tile server. Distances shown anywhere in the UI come from the API,
 * never from coordinates.
 */

import { el } from "./dom";

export interface MapMarker {
  id: string;
  lat: number;
  lon: number;
  label: string;
  status: string;
}

export interface MapAdapter {
  mount(container: HTMLElement, markers: MapMarker[], origin: { lat: number; lon: number }): void;
}

const SVG_NS = "http://www.w3.org/2000/svg";

export class StaticPlotAdapter implements MapAdapter {
  mount(container: HTMLElement, markers: MapMarker[], origin: { lat: number; lon: number }): void {
    container.replaceChildren();
    const width = 420;
    const height = 280;
    const pad = 24;

    const lats = [origin.lat, ...markers.map((m) => m.lat)];
    const lons = [origin.lon, ...markers.map((m) => m.lon)];
    const minLat = Math.min(...lats);
    const maxLat = Math.max(...lats);
    const minLon = Math.min(...lons);
    const maxLon = Math.max(...lons);
    const latSpan = maxLat - minLat || 1;
    const lonSpan = maxLon - minLon || 1;

    const x = (lon: number) => pad + ((lon - minLon) / lonSpan) * (width - 2 * pad);
    const y = (lat: number) => height - pad - ((lat - minLat) / latSpan) * (height - 2 * pad);

    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
    svg.setAttribute("class", "map-plot");
    svg.setAttribute("role", "img");
    svg.setAttribute("aria-label", "Center locations relative to you");

    const you = document.createElementNS(SVG_NS, "circle");
    you.setAttribute("cx", String(x(origin.lon)));
    you.setAttribute("cy", String(y(origin.lat)));
    you.setAttribute("r", "6");
    you.setAttribute("class", "map-origin");
    svg.append(you);

    for (const marker of markers) {
      const group = document.createElementNS(SVG_NS, "g");
      group.setAttribute("data-center-id", marker.id);
      const dot = document.createElementNS(SVG_NS, "circle");
      dot.setAttribute("cx", String(x(marker.lon)));
      dot.setAttribute("cy", String(y(marker.lat)));
      dot.setAttribute("r", "5");
      dot.setAttribute("class", `map-marker map-marker-${marker.status}`);
      const title = document.createElementNS(SVG_NS, "title");
      title.textContent = marker.label;
      dot.append(title);
      group.append(dot);
      svg.append(group);
    }

    container.append(svg, el("p", { class: "map-caption" },
      "Offline coordinate plot; your position is the filled dot."));
  }
}

export class TileImageAdapter implements MapAdapter {
  constructor(private readonly urlTemplate: string, private readonly zoom = 12) {}

  mount(container: HTMLElement, markers: MapMarker[], origin: { lat: number; lon: number }): void {
    container.replaceChildren();
    const tileX = Math.floor(((origin.lon + 180) / 360) * 2 ** this.zoom);
    const latRad = (origin.lat * Math.PI) / 180;
    const tileY = Math.floor(
      ((1 - Math.log(Math.tan(latRad) + 1 / Math.cos(latRad)) / Math.PI) / 2) * 2 ** this.zoom);
    const url = this.urlTemplate
      .replace("{z}", String(this.zoom))
      .replace("{x}", String(tileX))
      .replace("{y}", String(tileY));
    const img = el("img", { src: url, alt: "map tile", class: "map-tile" });
    img.addEventListener("error", () => new StaticPlotAdapter().mount(container, markers, origin));
    container.append(img);
  }
}

export function defaultMapAdapter(): MapAdapter {
  const template = import.meta.env?.VITE_TILE_URL as string | undefined;
  return template ? new TileImageAdapter(template) : new StaticPlotAdapter();
}
