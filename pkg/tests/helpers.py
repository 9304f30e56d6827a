from drapsim.core import Task


def task(tid, req, time=None):
    t = 25 * req if time is None else time
    return Task(id=tid, cpu_req=req, time_total=t, time_rem=t)


def tasks_with_reqs(reqs):
    return [task(i, r) for i, r in enumerate(reqs)]
