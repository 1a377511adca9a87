/** Typed client for the calibration service HTTP API.
 *
 * The UI consumes exactly this API and performs no numerical work of its
 * own: every displayed number is a verbatim service response.
 */

export interface ZoneSummary {
  id: string;
  name: string;
  bbox: [number, number, number, number];
}

export interface RasterSummary {
  id: string;
  sensor: "MODIS" | "SENTINEL2";
  width: number;
  height: number;
  pixel_width: number;
  pixel_height: number;
  path?: string;
}

export interface ZonalStats {
  zone_id: string;
  raster_id: string;
  threshold: number;
  pixels_total: number;
  pixels_veg: number;
  pixels_nodata: number;
  total_area_km2: number;
  veg_area_km2: number;
  veg_pct: number;
  nodata_pct: number;
}

export interface ThresholdRecord {
  zone_id: string;
  sensor: "MODIS" | "SENTINEL2";
  threshold: number;
}

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number | null = null,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(`service unreachable: ${String(err)}`);
    }
    let body: unknown;
    try {
      body = await response.json();
    } catch {
      throw new ApiError(`malformed JSON from ${path}`, response.status);
    }
    if (!response.ok) {
      const message =
        typeof body === "object" && body !== null && "error" in body
          ? String((body as { error: unknown }).error)
          : `HTTP ${response.status}`;
      throw new ApiError(message, response.status);
    }
    return body as T;
  }

  async zones(): Promise<ZoneSummary[]> {
    const body = await this.request<ZoneSummary[]>("/api/zones");
    if (!Array.isArray(body)) throw new ApiError("zones: expected an array");
    return body;
  }

  async rasters(): Promise<RasterSummary[]> {
    const body = await this.request<RasterSummary[]>("/api/rasters");
    if (!Array.isArray(body)) throw new ApiError("rasters: expected an array");
    return body;
  }

  stats(
    zoneId: string,
    rasterId: string,
    threshold: number,
    signal?: AbortSignal,
  ): Promise<ZonalStats> {
    const query = `raster=${encodeURIComponent(rasterId)}&threshold=${threshold}`;
    return this.request<ZonalStats>(`/api/zones/${zoneId}/stats?${query}`, { signal });
  }

  async thresholds(): Promise<ThresholdRecord[]> {
    const body = await this.request<{ records: ThresholdRecord[] }>("/api/thresholds");
    if (!body || !Array.isArray(body.records)) {
      throw new ApiError("thresholds: expected {records: [...]}");
    }
    return body.records;
  }

  putThreshold(record: ThresholdRecord): Promise<ThresholdRecord> {
    return this.request<ThresholdRecord>(`/api/thresholds/${record.zone_id}`, {
      method: "PUT",
      body: JSON.stringify({ sensor: record.sensor, threshold: record.threshold }),
    });
  }

  previewUrl(rasterId: string, window?: string): string {
    const suffix = window ? `?window=${window}` : "";
    return `${this.baseUrl}/api/rasters/${rasterId}/preview.png${suffix}`;
  }

  maskUrl(rasterId: string, threshold: number, zoneId?: string, window?: string): string {
    const params = new URLSearchParams({ threshold: String(threshold) });
    if (zoneId) params.set("zone", zoneId);
    if (window) params.set("window", window);
    return `${this.baseUrl}/api/rasters/${rasterId}/mask.png?${params.toString()}`;
  }
}
