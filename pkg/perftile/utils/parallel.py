# utils/parallel.py
"""
--threads 용 작은 헬퍼

- threads == 1 이면 그냥 순서대로 돈다. 이게 기준(reference) 동작이다.
- threads > 1 이면 ThreadPoolExecutor 로 나눠 돌리고, 결과는 항상 입력 순서대로 합친다.
  (numpy 연산이 GIL 을 놓는 구간에서만 실제로 빨라진다)
"""

from __future__ import annotations

import concurrent.futures
from typing import Callable, Iterable, Optional, Sequence, TypeVar

from perftile.settings import get_settings

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: Optional[int]) -> int:
    if threads is None:
        threads = get_settings().threads
    return max(1, int(threads))


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> list[R]:
    """fn 을 items 각각에 적용한 결과를 입력 순서대로."""
    items = list(items)
    w = resolve_threads(threads)
    if w == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=w) as executor:
        return list(executor.map(fn, items))


def first_hit(
    fn: Callable[[T], Optional[R]],
    items: Sequence[T],
    threads: Optional[int] = None,
) -> Optional[R]:
    """
    입력 순서로 봤을 때 처음으로 None 이 아닌 fn(x) 결과.

    병렬일 때는 threads 개씩 묶어서 돌리고, 묶음 안에서도 입력 순서로 고른다.
    그래서 순차 실행과 같은 결과가 나온다.
    """
    w = resolve_threads(threads)
    if w == 1:
        for x in items:
            hit = fn(x)
            if hit is not None:
                return hit
        return None
    with concurrent.futures.ThreadPoolExecutor(max_workers=w) as executor:
        for start in range(0, len(items), w):
            batch = items[start : start + w]
            for hit in executor.map(fn, batch):
                if hit is not None:
                    return hit
    return None
