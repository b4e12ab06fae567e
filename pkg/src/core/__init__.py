"""
核心模块

图与群体、模型、抽样、估计与诊断
"""
