/** Bundled per-city reference thresholds (the manual-calibration table the
 * service's 0.58 / 0.40 defaults are derived from), shown next to live
 * values so an analyst can compare their pick against the reference.
 *
 * Mirrors src/greenzonal/data/reference_thresholds.csv in the backend.
 */

export interface ReferenceThresholds {
  name: string;
  modis: number;
  sentinel2: number;
}

export const REFERENCE_THRESHOLDS: Record<string, ReferenceThresholds> = {
  "alba-iulia": { name: "Alba Iulia", modis: 0.6, sentinel2: 0.35 },
  alexandria: { name: "Alexandria", modis: 0.55, sentinel2: 0.4 },
  arad: { name: "Arad", modis: 0.6, sentinel2: 0.4 },
  bacau: { name: "Bacău", modis: 0.65, sentinel2: 0.45 },
  "baia-mare": { name: "Baia Mare", modis: 0.65, sentinel2: 0.4 },
  bistrita: { name: "Bistrița", modis: 0.6, sentinel2: 0.4 },
  botosani: { name: "Botoșani", modis: 0.5, sentinel2: 0.35 },
  braila: { name: "Brăila", modis: 0.6, sentinel2: 0.45 },
  brasov: { name: "Brașov", modis: 0.65, sentinel2: 0.45 },
  bucuresti: { name: "București", modis: 0.7, sentinel2: 0.45 },
  buzau: { name: "Buzău", modis: 0.55, sentinel2: 0.35 },
  calarasi: { name: "Călărași", modis: 0.55, sentinel2: 0.35 },
  "cluj-napoca": { name: "Cluj-Napoca", modis: 0.65, sentinel2: 0.4 },
  constanta: { name: "Constanța", modis: 0.55, sentinel2: 0.4 },
  craiova: { name: "Craiova", modis: 0.6, sentinel2: 0.35 },
  deva: { name: "Deva", modis: 0.65, sentinel2: 0.45 },
  "drobeta-turnu-severin": {
    name: "Drobeta-Turnu Severin",
    modis: 0.5,
    sentinel2: 0.4,
  },
  focsani: { name: "Focșani", modis: 0.55, sentinel2: 0.4 },
  galati: { name: "Galați", modis: 0.6, sentinel2: 0.35 },
  giurgiu: { name: "Giurgiu", modis: 0.55, sentinel2: 0.4 },
  iasi: { name: "Iași", modis: 0.6, sentinel2: 0.4 },
  "miercurea-ciuc": { name: "Miercurea Ciuc", modis: 0.55, sentinel2: 0.35 },
  oradea: { name: "Oradea", modis: 0.65, sentinel2: 0.35 },
  "piatra-neamt": { name: "Piatra-Neamț", modis: 0.65, sentinel2: 0.45 },
  pitesti: { name: "Pitești", modis: 0.6, sentinel2: 0.5 },
  ploiesti: { name: "Ploiești", modis: 0.6, sentinel2: 0.35 },
  "ramnicu-valcea": { name: "Râmnicu Vâlcea", modis: 0.6, sentinel2: 0.4 },
  resita: { name: "Reșița", modis: 0.5, sentinel2: 0.45 },
  "satu-mare": { name: "Satu Mare", modis: 0.55, sentinel2: 0.35 },
  "sfantu-gheorghe": { name: "Sfântu Gheorghe", modis: 0.55, sentinel2: 0.35 },
  sibiu: { name: "Sibiu", modis: 0.55, sentinel2: 0.35 },
  slatina: { name: "Slatina", modis: 0.55, sentinel2: 0.45 },
  slobozia: { name: "Slobozia", modis: 0.6, sentinel2: 0.45 },
  suceava: { name: "Suceava", modis: 0.55, sentinel2: 0.4 },
  targoviste: { name: "Târgoviște", modis: 0.6, sentinel2: 0.35 },
  "targu-jiu": { name: "Târgu Jiu", modis: 0.55, sentinel2: 0.4 },
  "targu-mures": { name: "Târgu Mureș", modis: 0.5, sentinel2: 0.35 },
  timisoara: { name: "Timișoara", modis: 0.5, sentinel2: 0.4 },
  tulcea: { name: "Tulcea", modis: 0.55, sentinel2: 0.35 },
  vaslui: { name: "Vaslui", modis: 0.5, sentinel2: 0.45 },
  zalau: { name: "Zalău", modis: 0.55, sentinel2: 0.35 },
};
