// Wire types for the /v1 JSON API. Field names mirror the server payloads
// exactly; the UI renders these numbers verbatim and never derives its own.
export {};
