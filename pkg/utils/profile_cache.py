import inspect
import threading
import time
from functools import wraps
from pathlib import Path

_cache = {}
_lock = threading.Lock()


def file_cache(timeout=300):
    """
    Decorator to cache the result of loading a file.

    The key combines the function name, the resolved path and the file's
    modification time, so a rewritten file is read again immediately.

    Args:
        timeout (int): Cache timeout in seconds
    """
    def decorator(func):
        param_names = list(inspect.signature(func).parameters)

        @wraps(func)
        def wrapper(*args, **kwargs):
            bound = dict(zip(param_names, args))
            bound.update(kwargs)
            path = Path(bound[param_names[0]])
            try:
                mtime = path.stat().st_mtime_ns
            except OSError:
                # Let the wrapped function report the missing file
                return func(*args, **kwargs)

            cache_key = (func.__qualname__, str(path.resolve()), mtime)
            with _lock:
                if cache_key in _cache:
                    cache_time, cached_result = _cache[cache_key]
                    if time.time() - cache_time < timeout:
                        return cached_result

            result = func(*args, **kwargs)

            with _lock:
                _cache[cache_key] = (time.time(), result)
            return result

        def clear():
            with _lock:
                for key in [k for k in _cache if k[0] == func.__qualname__]:
                    del _cache[key]

        wrapper.clear = clear
        return wrapper
    return decorator
