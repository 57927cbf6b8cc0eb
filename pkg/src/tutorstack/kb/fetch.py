"""Course-page fetching with strict limits and typed failures."""

from __future__ import annotations

from urllib.parse import urlparse

import requests

FETCH_TIMEOUT_SECONDS = 10.0
MAX_RESPONSE_BYTES = 5 * 1024 * 1024
MAX_REDIRECTS = 3


class FetchError(Exception):
    """Base class for everything that can go wrong while fetching a page."""


class SchemeNotAllowedError(FetchError):
    pass


class HttpStatusError(FetchError):
    def __init__(self, url: str, status: int):
        super().__init__(f"GET {url} returned status {status}")
        self.status = status


class FetchTimeoutError(FetchError):
    pass


class ResponseTooLargeError(FetchError):
    pass


class NetworkError(FetchError):
    pass


def fetch(
    url: str,
    timeout: float = FETCH_TIMEOUT_SECONDS,
    max_bytes: int = MAX_RESPONSE_BYTES,
    max_redirects: int = MAX_REDIRECTS,
) -> bytes:
    """GET the url, returning the body only for a 200 within the size cap."""
    scheme = urlparse(url).scheme.lower()
    if scheme not in ("http", "https"):
        raise SchemeNotAllowedError(f"only http/https urls are fetchable, got {url!r}")
    session = requests.Session()
    session.max_redirects = max_redirects
    try:
        with session.get(url, timeout=timeout, stream=True, allow_redirects=True) as resp:
            if resp.status_code != 200:
                raise HttpStatusError(url, resp.status_code)
            body = bytearray()
            for part in resp.iter_content(chunk_size=65536):
                body.extend(part)
                if len(body) > max_bytes:
                    raise ResponseTooLargeError(
                        f"{url} exceeded the {max_bytes} byte response cap"
                    )
            return bytes(body)
    except requests.Timeout as exc:
        raise FetchTimeoutError(f"GET {url} timed out after {timeout}s") from exc
    except requests.TooManyRedirects as exc:
        raise NetworkError(f"GET {url} exceeded {max_redirects} redirects") from exc
    except requests.RequestException as exc:
        raise NetworkError(f"GET {url} failed: {exc}") from exc
    finally:
        session.close()
