"""
명령 처리 계층 - 명령별 실행기, 산출물 내보내기, 그림 데이터
"""
